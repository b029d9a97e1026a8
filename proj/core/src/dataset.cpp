#include "igr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "igr/error.hpp"

namespace igr {

namespace {

void validate(const Environment& env) {
  if (env.x.rows() < 1) throw ValidationError("environment '" + env.id + "' has no samples");
  if (env.x.rows() != env.y.size())
    throw ValidationError("environment '" + env.id + "': X has " + std::to_string(env.x.rows()) +
                          " rows but y has " + std::to_string(env.y.size()));
  if (!env.x.allFinite() || !env.y.allFinite())
    throw ValidationError("environment '" + env.id + "' contains non-finite values");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty())
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": cannot parse '" + s + "' as a number");
  if (!std::isfinite(v))
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": non-finite value '" + s + "'");
  return v;
}

}  // namespace

MultiEnvDataset::MultiEnvDataset(std::vector<Environment> envs) {
  for (auto& e : envs) add(std::move(e));
}

void MultiEnvDataset::add(Environment env) {
  validate(env);
  const int d = static_cast<int>(env.x.cols());
  if (d < 1) throw ValidationError("environment '" + env.id + "' has no covariates");
  if (!envs_.empty() && d != d_)
    throw ValidationError("environment '" + env.id + "' has d=" + std::to_string(d) + ", expected " +
                          std::to_string(d_));
  d_ = d;
  envs_.push_back(std::move(env));
}

Environment read_environment_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "y")
    throw ValidationError(path.string() + ": header must be x1,...,xd,y");
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j)
    if (header[j] != "x" + std::to_string(j + 1))
      throw ValidationError(path.string() + ": expected column 'x" + std::to_string(j + 1) + "', got '" +
                            header[j] + "'");

  std::vector<double> values;
  std::size_t rows = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != d + 1)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(d + 1) +
                            " fields, got " + std::to_string(cells.size()));
    for (const auto& c : cells) values.push_back(parse_double(c, path, lineno));
    ++rows;
  }
  Environment env;
  env.id = path.stem().string();
  env.x.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  env.y.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j)
      env.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * (d + 1) + j];
    env.y(static_cast<Eigen::Index>(i)) = values[i * (d + 1) + d];
  }
  validate(env);
  return env;
}

MultiEnvDataset read_dataset_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError(dir.string() + " contains no .csv files");
  MultiEnvDataset data;
  for (const auto& f : files) data.add(read_environment_csv(f));
  return data;
}

void write_environment_csv(const std::filesystem::path& path, const Environment& env) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (Eigen::Index j = 0; j < env.x.cols(); ++j) out << "x" << j + 1 << ",";
  out << "y\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < env.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < env.x.cols(); ++j) out << env.x(i, j) << ",";
    out << env.y(i) << "\n";
  }
}

}  // namespace igr
