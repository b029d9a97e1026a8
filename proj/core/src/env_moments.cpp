#include "igr/env_moments.hpp"

#include <cmath>

namespace igr {

EnvMomentSet<double> moments_from_samples(const MultiEnvDataset& data, const MomentOptions& opts) {
  if (data.num_envs() == 0) throw ValidationError("dataset has no environments");
  const int d = data.d();
  std::vector<Mat<double>> sigma;
  std::vector<Vec<double>> u;
  std::vector<double> y2;
  std::vector<Eigen::VectorXd> x_means;
  std::vector<double> y_means;
  for (const auto& env : data.envs()) {
    const double n = static_cast<double>(env.x.rows());
    Eigen::VectorXd mx = Eigen::VectorXd::Zero(d);
    double my = 0.0;
    if (opts.center) {
      mx = env.x.colwise().mean().transpose();
      my = env.y.mean();
    }
    const Eigen::MatrixXd xc = env.x.rowwise() - mx.transpose();
    const Eigen::VectorXd yc = env.y.array() - my;
    Mat<double> s = (xc.transpose() * xc) / n;
    s = 0.5 * (s + s.transpose()).eval();
    sigma.push_back(s);
    u.push_back((xc.transpose() * yc) / n);
    y2.push_back(yc.squaredNorm() / n);
    x_means.push_back(mx);
    y_means.push_back(my);
  }

  Eigen::VectorXd scale = Eigen::VectorXd::Ones(d);
  if (opts.normalize) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
    for (const auto& s : sigma) diag += s.diagonal();
    diag /= static_cast<double>(sigma.size());
    for (int j = 0; j < d; ++j) {
      if (!(diag(j) > 0.0)) throw ValidationError("covariate x" + std::to_string(j + 1) + " has zero variance");
      scale(j) = std::sqrt(diag(j));
    }
    const Eigen::VectorXd inv = scale.cwiseInverse();
    for (std::size_t e = 0; e < sigma.size(); ++e) {
      sigma[e] = inv.asDiagonal() * sigma[e] * inv.asDiagonal();
      u[e] = inv.asDiagonal() * u[e];
    }
  }

  auto m = make_moment_set<double>(std::move(sigma), std::move(u), std::move(y2));
  if (opts.normalize) m.pooled_sigma.diagonal().setOnes();
  for (int e = 0; e < data.num_envs(); ++e) m.sample_sizes[static_cast<std::size_t>(e)] = data.env(e).x.rows();
  m.scale = scale;
  m.x_means = std::move(x_means);
  m.y_means = std::move(y_means);
  return m;
}

}  // namespace igr
