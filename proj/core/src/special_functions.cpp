#include "cloaksim/special_functions.hpp"

#include <cmath>
#include <limits>

namespace cloaksim::special {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// Ascending series for J0 and the companion sum needed by Y0:
//   J0 = sum (-1)^k (x^2/4)^k / (k!)^2
//   S  = sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2
struct AscendingSums {
  double j0;
  double s;
};

AscendingSums ascending(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double j0 = 1.0;
  double s = 0.0;
  double harmonic = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    j0 += term;
    s -= harmonic * term;
    if (std::abs(term) * (1.0 + harmonic) < 1e-18 * std::max(1.0, std::abs(j0))) break;
  }
  return {j0, s};
}

// Hankel asymptotic expansion, truncated before the smallest term:
//   P ~ sum (-1)^k a_{2k} / x^{2k},  Q ~ -sum (-1)^k a_{2k+1} / x^{2k+1}
// with a_k = prod_{j=1..k} (2j-1)^2 / (k! 8^k) for order zero.
struct AsymptoticPQ {
  double p;
  double q;
};

AsymptoticPQ asymptotic(double x) {
  double p = 1.0;
  double q = 0.0;
  double ak = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    ak *= odd * odd / (8.0 * k * x);
    if (ak >= prev) break;
    prev = ak;
    // k odd -> Q, k even -> P; for order zero Q starts at -1/(8x).
    const int m = k / 2;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1)
      q -= sign * ak;
    else
      p += sign * ak;
    if (ak < 1e-17) break;
  }
  return {p, q};
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= kSeriesCutover) return ascending(x).j0;
  const auto [p, q] = asymptotic(x);
  const double chi = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_y0(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_y0: argument must be positive");
  if (x <= kSeriesCutover) {
    const auto [j0, s] = ascending(x);
    return (2.0 / kPi) * ((std::log(0.5 * x) + kEulerGamma) * j0 + s);
  }
  const auto [p, q] = asymptotic(x);
  const double chi = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

Complex hankel1_0(double x) {
  if (!(x > 0.0)) throw DomainError("hankel1_0: argument must be positive");
  if (x <= kSeriesCutover) {
    const auto [j0, s] = ascending(x);
    return {j0, (2.0 / kPi) * ((std::log(0.5 * x) + kEulerGamma) * j0 + s)};
  }
  const auto [p, q] = asymptotic(x);
  // H0 = sqrt(2/(pi x)) (P + iQ) e^{i chi}
  const double chi = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * Complex(p, q) * std::polar(1.0, chi);
}

}  // namespace cloaksim::special
