#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cloaksim/cloak_map.hpp"
#include "cloaksim/helmholtz.hpp"

namespace cloaksim {

/// u0 = i H0(k |x - x0|) / 4 with k = omega sqrt(rho / mu).
/// Throws DomainError at x == x0.
Complex green_free(double mu, double rho, double omega, const Vec2& x, const Vec2& x0);

enum class ScatterRegion { r1, r2, r3, custom };

std::string_view to_string(ScatterRegion kind);
ScatterRegion scatter_region_from_string(std::string_view name);

struct Region {
  ScatterRegion kind = ScatterRegion::custom;
  std::vector<Vec2> polygon;  // simple polygon, counter-clockwise

  double area() const;
  /// Closed-polygon membership with an absolute boundary tolerance.
  bool contains(const Vec2& x, double tol = 1e-12) const;
  Rect bounds() const;
};

/// Default region polygons for a cloak and source, in units of s = a:
///   R1: [0, 8s] x [-8s, 8s] minus the notch [0, n] x [-n, n], n = max(2s, a+w);
///   R2: trapezoid 2 sqrt2 s <= x1 <= 2 sqrt2 s + 4s, |x2| <= x1;
///   R3: R2 turned towards a diagonal source.
/// R1 and R2 turn with the source by quarter turns, R3 by odd multiples
/// of 45 degrees, so the region always faces away from the source.
Region make_region(ScatterRegion kind, const CloakSpec& spec, const Vec2& source);

/// Throws GeometryError if any part of R overlaps the cloak square or the
/// PML of the grid.
void check_region(const Region& r, const CloakSpec& spec, const Grid& grid);

/// E = sum |u1 - u2|^2 / sum |u2|^2 over grid cells whose centres lie in R
/// (midpoint rule; u1 is interpolated to the centre).
double scattering_measure(const ComplexField& u1, const std::function<Complex(const Vec2&)>& u2, const Region& r);
double scattering_measure(const ComplexField& u1, const ComplexField& u2, const Region& r);

/// Q = |E_u - E_c| / E_u. Throws DomainError unless E_u > 0.
double quality_factor(double E_uncloaked, double E_cloaked);

struct ProfilePoint {
  double position = 0.0;  // arc length from the screen start
  double magnitude = 0.0;
};

/// |u| at equally spaced points of the screen, bilinear in |u|.
std::vector<ProfilePoint> fringe_profile(const ComplexField& u, const Vec2& p0, const Vec2& p1, int samples);

/// Pearson correlation of two sampled profiles of equal length.
double profile_correlation(const std::vector<ProfilePoint>& a, const std::vector<ProfilePoint>& b);

/// Interior local maxima exceeding both neighbours by `prominence` times the
/// profile maximum.
int count_local_maxima(const std::vector<ProfilePoint>& p, double prominence = 0.02);

struct MeasureReport {
  std::string scenario;
  double omega = 0.0;
  Vec2 source = Vec2::Zero();
  ScatterRegion region = ScatterRegion::r1;
  double E_baseline = 0.0;
  double E_uncloaked = 0.0;
  double E_cloaked = 0.0;
  double Q = 0.0;
};

void write_measure_header(std::ostream& out);
void write_measure_row(std::ostream& out, const MeasureReport& r);

}  // namespace cloaksim
