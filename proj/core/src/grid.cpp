#include "cloaksim/grid.hpp"

#include <algorithm>
#include <cmath>

namespace cloaksim {

Rect Rect::united(const Rect& o) const {
  return {std::min(x1_lo, o.x1_lo), std::max(x1_hi, o.x1_hi), std::min(x2_lo, o.x2_lo),
          std::max(x2_hi, o.x2_hi)};
}

Grid Grid::covering(const Rect& interior, double h, const PmlSpec& pml, double wave_speed) {
  if (!(h > 0.0)) throw GeometryError("grid: spacing must be positive");
  if (pml.cells < 8) throw GeometryError("grid: PML must be at least 8 cells thick");
  if (!(pml.reflection > 0.0 && pml.reflection < 1.0)) throw GeometryError("grid: PML reflection must lie in (0, 1)");
  if (!(interior.x1_hi > interior.x1_lo) || !(interior.x2_hi > interior.x2_lo))
    throw GeometryError("grid: empty interior rectangle");

  // Snap with a little slack so that bounds which are already multiples of
  // h (up to rounding) are not pushed out by one cell.
  const double slack = 1e-9;
  const long lo1 = static_cast<long>(std::floor(interior.x1_lo / h + slack));
  const long hi1 = static_cast<long>(std::ceil(interior.x1_hi / h - slack));
  const long lo2 = static_cast<long>(std::floor(interior.x2_lo / h + slack));
  const long hi2 = static_cast<long>(std::ceil(interior.x2_hi / h - slack));

  Grid g;
  g.h_ = h;
  g.pml_ = pml;
  g.i0_ = lo1 - pml.cells;
  g.j0_ = lo2 - pml.cells;
  g.n1_ = static_cast<int>(hi1 - lo1) + 1 + 2 * pml.cells;
  g.n2_ = static_cast<int>(hi2 - lo2) + 1 + 2 * pml.cells;
  const double depth = pml.cells * h;
  g.sigma_max_ = (pml.power + 1.0) * wave_speed * std::log(1.0 / pml.reflection) / (2.0 * depth);
  return g;
}

Rect Grid::interior() const {
  const double p = pml_.cells;
  return {h_ * (i0_ + p), h_ * (i0_ + n1_ - 1 - p), h_ * (j0_ + p), h_ * (j0_ + n2_ - 1 - p)};
}

Rect Grid::extent() const {
  return {h_ * i0_, h_ * (i0_ + n1_ - 1), h_ * j0_, h_ * (j0_ + n2_ - 1)};
}

bool Grid::in_pml(const Vec2& x) const { return !interior().contains(x, 1e-12 * h_); }

Vec2 Grid::sigma(const Vec2& x) const {
  const Rect in = interior();
  const double depth = pml_.cells * h_;
  auto profile = [&](double d) {
    if (d <= 0.0) return 0.0;
    return sigma_max_ * std::pow(std::min(d, depth) / depth, pml_.power);
  };
  const double d1 = std::max(in.x1_lo - x[0], x[0] - in.x1_hi);
  const double d2 = std::max(in.x2_lo - x[1], x[1] - in.x2_hi);
  return {profile(d1), profile(d2)};
}

std::pair<Complex, Complex> Grid::stretch(const Vec2& x, double omega) const {
  const Vec2 s = sigma(x);
  return {Complex(1.0, s[0] / omega), Complex(1.0, s[1] / omega)};
}

std::pair<int, int> Grid::nearest(const Vec2& x) const {
  const long i = std::lround(x[0] / h_) - i0_;
  const long j = std::lround(x[1] / h_) - j0_;
  return {static_cast<int>(std::clamp<long>(i, 0, n1_ - 1)), static_cast<int>(std::clamp<long>(j, 0, n2_ - 1))};
}

}  // namespace cloaksim
