#include <gtest/gtest.h>

#include <cmath>

#include "cloaksim/analysis.hpp"
#include "cloaksim/special_functions.hpp"

using namespace cloaksim;

namespace {

// Independent ascending series, summed in long double.
long double series_j0(long double x) {
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4.0L) / (static_cast<long double>(k) * k);
    sum += term;
  }
  return sum;
}

long double series_y0(long double x) {
  const long double gamma = 0.57721566490153286060651209L;
  long double term = 1.0L, harmonic = 0.0L, tail = 0.0L;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4.0L) / (static_cast<long double>(k) * k);
    harmonic += 1.0L / k;
    tail += term * harmonic;
  }
  const long double pi = 3.14159265358979323846264338L;
  return 2.0L / pi * ((std::log(x / 2.0L) + gamma) * series_j0(x) - tail);
}

}  // namespace

TEST(Bessel, ReferenceValuesAtOne) {
  EXPECT_NEAR(special::bessel_j0(1.0), 0.7651976866, 1e-10);
  EXPECT_NEAR(special::bessel_y0(1.0), 0.0882569642, 1e-10);
  EXPECT_NEAR(special::bessel_j0(1.0), static_cast<double>(series_j0(1.0L)), 1e-15);
  EXPECT_NEAR(special::bessel_y0(1.0), static_cast<double>(series_y0(1.0L)), 1e-15);
}

TEST(Bessel, MatchesStandardLibraryAcrossCutover) {
  for (double x = 0.05; x < 60.0; x += 0.0731) {
    EXPECT_NEAR(special::bessel_j0(x), std::cyl_bessel_j(0.0, x), 1e-10) << "x=" << x;
    EXPECT_NEAR(special::bessel_y0(x), std::cyl_neumann(0.0, x), 1e-10) << "x=" << x;
  }
}

TEST(Bessel, ContinuousAtCutover) {
  const double c = special::kSeriesCutover;
  // Step small enough that the slope contributes below the tolerance.
  const double d = 1e-13;
  EXPECT_NEAR(special::bessel_j0(c - d), special::bessel_j0(c + d), 1e-11);
  EXPECT_NEAR(special::bessel_y0(c - d), special::bessel_y0(c + d), 1e-11);
}

TEST(Hankel, LargeArgumentModulus) {
  const double x = 50.0;
  EXPECT_NEAR(std::abs(special::hankel1_0(x)) / std::sqrt(2.0 / (kPi * x)), 1.0, 1e-3);
  const Complex h = special::hankel1_0(2.5);
  EXPECT_DOUBLE_EQ(h.real(), special::bessel_j0(2.5));
  EXPECT_DOUBLE_EQ(h.imag(), special::bessel_y0(2.5));
}

TEST(Hankel, RejectsNonPositiveArgument) {
  EXPECT_THROW(special::bessel_y0(0.0), DomainError);
  EXPECT_THROW(special::hankel1_0(-1.0), DomainError);
}

TEST(GreenFree, ScalesWithWavenumber) {
  const Vec2 x0(-3, 0);
  const Vec2 x(-1, 0.5);
  const double r = (x - x0).norm();
  const Complex g = green_free(1.0, 1.0, 5.0, x, x0);
  EXPECT_NEAR(std::abs(g - Complex(0, 0.25) * special::hankel1_0(5.0 * r)), 0.0, 1e-15);
  const Complex g2 = green_free(4.0, 1.0, 10.0, x, x0);  // k = 10 / 2
  EXPECT_NEAR(std::abs(g2 - Complex(0, 0.25) * special::hankel1_0(5.0 * r)), 0.0, 1e-15);
  EXPECT_THROW(green_free(1.0, 1.0, 5.0, x0, x0), DomainError);
}
