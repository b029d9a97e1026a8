#include "igr/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace igr {

Definiteness classify_symmetric(const Mat<Rational>& m) {
  // Symmetric Gaussian elimination along the diagonal. A negative pivot means
  // indefinite; a zero pivot is admissible (PSD) only when its row is zero.
  Mat<Rational> a = m;
  const Eigen::Index n = a.rows();
  bool strict = true;
  for (Eigen::Index k = 0; k < n; ++k) {
    const int s = a(k, k).sign();
    if (s < 0) return Definiteness::indefinite;
    if (s == 0) {
      for (Eigen::Index j = k + 1; j < n; ++j)
        if (!a(k, j).is_zero()) return Definiteness::indefinite;
      strict = false;
      continue;
    }
    const Rational inv = Rational(1) / a(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (a(i, k).is_zero()) continue;
      const Rational f = a(i, k) * inv;
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return strict ? Definiteness::positive_definite : Definiteness::positive_semidefinite;
}

Definiteness classify_symmetric(const Mat<double>& m, double tol) {
  if (m.rows() == 0) return Definiteness::positive_definite;
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -tol * scale) return Definiteness::indefinite;
  if (ev.minCoeff() <= tol * scale) return Definiteness::positive_semidefinite;
  return Definiteness::positive_definite;
}

double min_eigenvalue(const Mat<double>& m) {
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Mat<double>& m) {
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace igr
