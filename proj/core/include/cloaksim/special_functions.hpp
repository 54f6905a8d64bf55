#pragma once

#include "cloaksim/types.hpp"

namespace cloaksim::special {

/// Argument at which the ascending series hands over to the asymptotic
/// Hankel expansion.
inline constexpr double kSeriesCutover = 12.0;

double bessel_j0(double x);
double bessel_y0(double x);  // x > 0

/// H_0^(1)(x) = J_0(x) + i Y_0(x), x > 0.
Complex hankel1_0(double x);

}  // namespace cloaksim::special
