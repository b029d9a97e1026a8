#pragma once

// Scalar types used by the numeric backends.
//
//   double          floating-point estimation backend
//   Rational        exact rationals (GMP), used for reduction instances
//   Biquadratic<P,Q> exact arithmetic in Q(sqrt P, sqrt Q), for population
//                   moments whose entries involve square roots

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <concepts>
#include <ostream>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "igr/error.hpp"

namespace igr {

class Rational {
 public:
  Rational() = default;
  template <std::integral I>
  Rational(I v) : v_(static_cast<long>(v)) {}  // NOLINT: implicit, Eigen builds Scalar(0)
  Rational(long num, long den);
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  /// Parses "p", "-p" or "p/q".
  static Rational parse(std::string_view text);

  double to_double() const { return v_.get_d(); }
  std::string str() const { return v_.get_str(); }
  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }
  const mpq_class& value() const { return v_; }

  /// True when the value is the square of a rational; `root` receives it.
  bool is_perfect_square(Rational* root = nullptr) const;

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) == 0; }
  friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class v_;
};

Rational abs(const Rational& r);

/// Element a0 + a1*sqrt(P) + a2*sqrt(Q) + a3*sqrt(PQ) of the field Q(sqrt P, sqrt Q).
/// P, Q and P*Q must not be perfect squares.
template <int P, int Q>
class Biquadratic {
  static_assert(P > 1 && Q > 1 && P != Q);

 public:
  Biquadratic() = default;
  template <std::integral I>
  Biquadratic(I v) : c_{Rational(v), 0, 0, 0} {}  // NOLINT
  Biquadratic(const Rational& r) : c_{r, 0, 0, 0} {}  // NOLINT
  Biquadratic(Rational a0, Rational a1, Rational a2, Rational a3)
      : c_{std::move(a0), std::move(a1), std::move(a2), std::move(a3)} {}

  /// Exact square root of a rational, when it lies in the field.
  static Biquadratic sqrt_of(const Rational& r);

  const Rational& coeff(int i) const { return c_[static_cast<std::size_t>(i)]; }
  bool is_zero() const { return c_[0].is_zero() && c_[1].is_zero() && c_[2].is_zero() && c_[3].is_zero(); }
  bool is_rational() const { return c_[1].is_zero() && c_[2].is_zero() && c_[3].is_zero(); }
  double to_double() const {
    return c_[0].to_double() + c_[1].to_double() * std::sqrt(double(P)) +
           c_[2].to_double() * std::sqrt(double(Q)) + c_[3].to_double() * std::sqrt(double(P) * Q);
  }
  std::string str() const;

  Biquadratic& operator+=(const Biquadratic& o) {
    for (std::size_t i = 0; i < 4; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Biquadratic& operator-=(const Biquadratic& o) {
    for (std::size_t i = 0; i < 4; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Biquadratic& operator*=(const Biquadratic& o) { return *this = *this * o; }
  Biquadratic& operator/=(const Biquadratic& o) { return *this = *this * o.inverse(); }

  friend Biquadratic operator+(Biquadratic a, const Biquadratic& b) { return a += b; }
  friend Biquadratic operator-(Biquadratic a, const Biquadratic& b) { return a -= b; }
  friend Biquadratic operator-(const Biquadratic& a) { return Biquadratic(-a.c_[0], -a.c_[1], -a.c_[2], -a.c_[3]); }
  friend Biquadratic operator/(const Biquadratic& a, const Biquadratic& b) { return a * b.inverse(); }
  friend Biquadratic operator*(const Biquadratic& a, const Biquadratic& b) {
    const auto& x = a.c_;
    const auto& y = b.c_;
    return Biquadratic(x[0] * y[0] + Rational(P) * x[1] * y[1] + Rational(Q) * x[2] * y[2] +
                           Rational(P * Q) * x[3] * y[3],
                       x[0] * y[1] + x[1] * y[0] + Rational(Q) * (x[2] * y[3] + x[3] * y[2]),
                       x[0] * y[2] + x[2] * y[0] + Rational(P) * (x[1] * y[3] + x[3] * y[1]),
                       x[0] * y[3] + x[3] * y[0] + x[1] * y[2] + x[2] * y[1]);
  }
  friend bool operator==(const Biquadratic& a, const Biquadratic& b) { return a.c_ == b.c_; }

  Biquadratic inverse() const;

  friend std::ostream& operator<<(std::ostream& os, const Biquadratic& b) { return os << b.str(); }

 private:
  std::array<Rational, 4> c_{};
};

using SurdQ35 = Biquadratic<3, 5>;

template <int P, int Q>
Biquadratic<P, Q> Biquadratic<P, Q>::inverse() const {
  if (is_zero()) throw NumericalError("division by zero in Q(sqrt" + std::to_string(P) + ", sqrt" + std::to_string(Q) + ")");
  // Conjugate over sqrt P, then over sqrt Q, to reach the rational norm.
  const Biquadratic conj_p(c_[0], -c_[1], c_[2], -c_[3]);
  const Biquadratic half = *this * conj_p;  // lies in Q(sqrt Q)
  const Biquadratic conj_q(half.c_[0], 0, -half.c_[2], 0);
  const Rational norm = (half * conj_q).c_[0];
  const Biquadratic num = conj_p * conj_q;
  return Biquadratic(num.c_[0] / norm, num.c_[1] / norm, num.c_[2] / norm, num.c_[3] / norm);
}

template <int P, int Q>
Biquadratic<P, Q> Biquadratic<P, Q>::sqrt_of(const Rational& r) {
  if (r.sign() < 0) throw ValidationError("square root of a negative number");
  if (r.is_zero()) return Biquadratic();
  const std::array<int, 4> radicands{1, P, Q, P * Q};
  for (std::size_t i = 0; i < 4; ++i) {
    Rational root;
    if ((r / Rational(radicands[i])).is_perfect_square(&root)) {
      std::array<Rational, 4> c{0, 0, 0, 0};
      c[i] = root;
      return Biquadratic(c[0], c[1], c[2], c[3]);
    }
  }
  throw ValidationError("sqrt(" + r.str() + ") is not representable in Q(sqrt" + std::to_string(P) +
                        ", sqrt" + std::to_string(Q) + ")");
}

template <int P, int Q>
std::string Biquadratic<P, Q>::str() const {
  static const std::array<std::string, 4> names{"", "*sqrt(" + std::to_string(P) + ")",
                                                "*sqrt(" + std::to_string(Q) + ")",
                                                "*sqrt(" + std::to_string(P * Q) + ")"};
  std::string out;
  for (std::size_t i = 0; i < 4; ++i) {
    if (c_[i].is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += c_[i].str() + names[i];
  }
  return out.empty() ? "0" : out;
}

/// Backend traits. `is_exact` types compare with ==; `is_ordered` types support <.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool is_exact = false;
  static constexpr bool is_ordered = true;
  static constexpr const char* name = "float64";
  static double to_double(double x) { return x; }
  static double from_rational(const Rational& r) { return r.to_double(); }
  static double sqrt_of(const Rational& r) { return std::sqrt(r.to_double()); }
  static double abs(double x) { return std::abs(x); }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool is_exact = true;
  static constexpr bool is_ordered = true;
  static constexpr const char* name = "exact-rational";
  static double to_double(const Rational& x) { return x.to_double(); }
  static Rational from_rational(const Rational& r) { return r; }
  static Rational sqrt_of(const Rational& r) {
    Rational root;
    if (r.sign() >= 0 && r.is_perfect_square(&root)) return root;
    throw ValidationError("sqrt(" + r.str() + ") is not rational");
  }
  static Rational abs(const Rational& x) { return igr::abs(x); }
};

template <int P, int Q>
struct ScalarTraits<Biquadratic<P, Q>> {
  static constexpr bool is_exact = true;
  static constexpr bool is_ordered = false;
  static constexpr const char* name = "exact-biquadratic";
  static double to_double(const Biquadratic<P, Q>& x) { return x.to_double(); }
  static Biquadratic<P, Q> from_rational(const Rational& r) { return Biquadratic<P, Q>(r); }
  static Biquadratic<P, Q> sqrt_of(const Rational& r) { return Biquadratic<P, Q>::sqrt_of(r); }
};

template <class T>
double to_double(const T& x) {
  return ScalarTraits<T>::to_double(x);
}

/// Exact zero test for exact backends; |x| <= tol for floating point.
template <class T>
bool is_zero(const T& x, double tol = 0.0) {
  if constexpr (ScalarTraits<T>::is_exact) {
    return x == T(0);
  } else {
    return std::abs(x) <= tol;
  }
}

}  // namespace igr

namespace Eigen {

template <>
struct NumTraits<igr::Rational> : GenericNumTraits<igr::Rational> {
  using Real = igr::Rational;
  using NonInteger = igr::Rational;
  using Nested = igr::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 20,
    AddCost = 50,
    MulCost = 50
  };
  static int digits10() { return 20; }
  static Real epsilon() { return Real(0); }
  static Real dummy_precision() { return Real(0); }
};

template <int P, int Q>
struct NumTraits<igr::Biquadratic<P, Q>> : GenericNumTraits<igr::Biquadratic<P, Q>> {
  using Real = igr::Biquadratic<P, Q>;
  using NonInteger = igr::Biquadratic<P, Q>;
  using Nested = igr::Biquadratic<P, Q>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 80,
    AddCost = 200,
    MulCost = 800
  };
  static int digits10() { return 20; }
  static Real epsilon() { return Real(0); }
  static Real dummy_precision() { return Real(0); }
};

}  // namespace Eigen
