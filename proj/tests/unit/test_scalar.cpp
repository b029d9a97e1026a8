#include <gtest/gtest.h>

#include "igr/linalg.hpp"
#include "igr/scalar.hpp"

using igr::Rational;
using igr::SurdQ35;

TEST(Rational, ParsesCanonicalForms) {
  EXPECT_EQ(Rational::parse("3/6"), Rational(1, 2));
  EXPECT_EQ(Rational::parse("-7"), Rational(-7));
  EXPECT_EQ(Rational::parse("+4/2"), Rational(2));
  EXPECT_EQ(Rational::parse("10/4").str(), "5/2");
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "1/0", "x", "1/2/3", "1.5", "/3", "3/"})
    EXPECT_THROW(Rational::parse(bad), igr::ValidationError) << bad;
}

TEST(Rational, ArithmeticIsExact) {
  const Rational third(1, 3);
  EXPECT_EQ(third + third + third, Rational(1));
  EXPECT_EQ(third * Rational(3) - Rational(1), Rational(0));
  EXPECT_THROW(third / Rational(0), igr::NumericalError);
  EXPECT_TRUE(Rational(9, 4).is_perfect_square());
  EXPECT_FALSE(Rational(2).is_perfect_square());
}

TEST(SurdQ35, InverseAndSqrt) {
  const SurdQ35 x(Rational(2), Rational(1), Rational(-1, 3), Rational(1, 5));
  EXPECT_EQ(x * x.inverse(), SurdQ35(1));
  const auto s15 = SurdQ35::sqrt_of(Rational(1, 15));
  EXPECT_EQ(s15 * s15, SurdQ35(Rational(1, 15)));
  EXPECT_NEAR(s15.to_double(), 1.0 / std::sqrt(15.0), 1e-15);
  EXPECT_THROW(SurdQ35::sqrt_of(Rational(2)), igr::ValidationError);
}

TEST(Linalg, ExactSolveAndDefiniteness) {
  igr::Mat<Rational> a(2, 2);
  a << 2, 1, 1, 3;
  igr::Vec<Rational> b(2);
  b << 1, 2;
  const auto x = igr::solve_linear<Rational>(a, b);
  ASSERT_TRUE(x);
  EXPECT_EQ((*x)(0), Rational(1, 5));
  EXPECT_EQ((*x)(1), Rational(3, 5));
  EXPECT_EQ(igr::classify_symmetric(a), igr::Definiteness::positive_definite);
  igr::Mat<Rational> sing(2, 2);
  sing << 1, 1, 1, 1;
  EXPECT_FALSE(igr::solve_linear<Rational>(sing, b));
  EXPECT_EQ(igr::classify_symmetric(sing), igr::Definiteness::positive_semidefinite);
  sing(1, 1) = 0;
  EXPECT_EQ(igr::classify_symmetric(sing), igr::Definiteness::indefinite);
}

TEST(Linalg, FloatSolveDetectsSingularity) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 2, 4;
  EXPECT_FALSE(igr::solve_linear<double>(a, Eigen::VectorXd::Ones(2)));
  a(1, 1) = 5;
  const auto x = igr::solve_linear<double>(a, Eigen::VectorXd::Ones(2));
  ASSERT_TRUE(x);
  EXPECT_NEAR((a * *x - Eigen::VectorXd::Ones(2)).norm(), 0.0, 1e-14);
}
