#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "igr/index_set.hpp"
#include "igr/scalar.hpp"

namespace igr {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
Mat<T> principal_submatrix(const Mat<T>& m, const IndexSet& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Mat<T> out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = m(s[a], s[b]);
  return out;
}

template <class T>
Vec<T> subvector(const Vec<T>& v, const IndexSet& s) {
  Vec<T> out(static_cast<Eigen::Index>(s.size()));
  for (std::size_t a = 0; a < s.size(); ++a) out(static_cast<Eigen::Index>(a)) = v(s[a]);
  return out;
}

/// Inverse of subvector: places `small` at positions `s` of a zero d-vector.
template <class T>
Vec<T> scatter(const Vec<T>& small, const IndexSet& s, Eigen::Index d) {
  Vec<T> out = Vec<T>::Constant(d, T(0));
  for (std::size_t a = 0; a < s.size(); ++a) out(s[a]) = small(static_cast<Eigen::Index>(a));
  return out;
}

/// Relative pivot threshold for the float backend.
inline constexpr double kPivotTolerance = 1e-12;

/// Solves A x = b by Gaussian elimination. Returns nullopt when A is singular:
/// an exact zero pivot for exact scalars, or a pivot below
/// kPivotTolerance * max|A_ij| with partial pivoting for double.
template <class T>
std::optional<Vec<T>> solve_linear(Mat<T> a, Vec<T> b) {
  const Eigen::Index n = a.rows();
  if (n == 0) return Vec<T>(0);
  double threshold = 0.0;
  if constexpr (!ScalarTraits<T>::is_exact) threshold = kPivotTolerance * a.cwiseAbs().maxCoeff();

  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = -1;
    if constexpr (ScalarTraits<T>::is_exact) {
      for (Eigen::Index r = col; r < n; ++r)
        if (!is_zero(a(r, col))) {
          piv = r;
          break;
        }
    } else {
      double best = threshold;
      for (Eigen::Index r = col; r < n; ++r)
        if (std::abs(a(r, col)) > best) {
          best = std::abs(a(r, col));
          piv = r;
        }
    }
    if (piv < 0) return std::nullopt;
    if (piv != col) {
      a.row(piv).swap(a.row(col));
      std::swap(b(piv), b(col));
    }
    const T inv = T(1) / a(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (is_zero(a(r, col))) continue;
      const T f = a(r, col) * inv;
      for (Eigen::Index c = col + 1; c < n; ++c) a(r, c) -= f * a(col, c);
      b(r) -= f * b(col);
      a(r, col) = T(0);
    }
  }
  Vec<T> x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    T acc = b(r);
    for (Eigen::Index c = r + 1; c < n; ++c) acc -= a(r, c) * x(c);
    x(r) = acc / a(r, r);
  }
  return x;
}

enum class Definiteness { positive_definite, positive_semidefinite, indefinite };

/// Classifies a symmetric matrix. Exact for Rational (symmetric elimination
/// with sign checks on the pivots); eigenvalue based with relative tolerance
/// `tol` for double.
Definiteness classify_symmetric(const Mat<Rational>& m);
Definiteness classify_symmetric(const Mat<double>& m, double tol = 1e-12);

/// Exact PD test in Q(sqrt P, sqrt Q) is not available (no ordering); compare
/// numerically. Used only for the PD flags of population moments.
template <int P, int Q>
Definiteness classify_symmetric(const Mat<Biquadratic<P, Q>>& m) {
  Mat<double> md(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) md(i, j) = m(i, j).to_double();
  return classify_symmetric(md);
}

template <class T>
bool is_symmetric(const Mat<T>& m, double tol = 0.0) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if constexpr (ScalarTraits<T>::is_exact) {
        if (!(m(i, j) == m(j, i))) return false;
      } else {
        const double scale = std::max({1.0, std::abs(m(i, j)), std::abs(m(j, i))});
        if (std::abs(m(i, j) - m(j, i)) > tol * scale) return false;
      }
    }
  return true;
}

template <class U, class T>
Mat<U> cast_matrix(const Mat<T>& m) {
  Mat<U> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<U, double>) out(i, j) = to_double(m(i, j));
      else out(i, j) = U(m(i, j));
    }
  return out;
}

template <class U, class T>
Vec<U> cast_vector(const Vec<T>& v) {
  Vec<U> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<U, double>) out(i) = to_double(v(i));
    else out(i) = U(v(i));
  }
  return out;
}

/// Smallest eigenvalue of a symmetric double matrix.
double min_eigenvalue(const Mat<double>& m);
double max_eigenvalue(const Mat<double>& m);

}  // namespace igr
