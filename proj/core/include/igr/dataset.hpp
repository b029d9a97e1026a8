#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace igr {

struct Environment {
  std::string id;
  Eigen::MatrixXd x;  // n_e x d
  Eigen::VectorXd y;  // n_e
};

/// Raw per-environment samples sharing a covariate dimension d.
class MultiEnvDataset {
 public:
  MultiEnvDataset() = default;
  explicit MultiEnvDataset(std::vector<Environment> envs);

  int d() const { return d_; }
  int num_envs() const { return static_cast<int>(envs_.size()); }
  const Environment& env(int e) const { return envs_.at(static_cast<std::size_t>(e)); }
  const std::vector<Environment>& envs() const { return envs_; }

  /// Appends after validating shape and finiteness.
  void add(Environment env);

 private:
  std::vector<Environment> envs_;
  int d_ = 0;
};

/// Reads one environment from CSV with header x1,...,xd,y.
Environment read_environment_csv(const std::filesystem::path& path);

/// Reads every *.csv in `dir`, sorted by file name; ids are the file stems.
MultiEnvDataset read_dataset_dir(const std::filesystem::path& dir);

void write_environment_csv(const std::filesystem::path& path, const Environment& env);

}  // namespace igr
