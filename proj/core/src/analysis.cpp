#include "cloaksim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "cloaksim/csv.hpp"
#include "cloaksim/special_functions.hpp"

namespace cloaksim {

Complex green_free(double mu, double rho, double omega, const Vec2& x, const Vec2& x0) {
  const double r = (x - x0).norm();
  if (!(r > 0.0)) throw DomainError("green_free: singular at the source point");
  const double k = omega * std::sqrt(rho / mu);
  return Complex(0.0, 0.25) * special::hankel1_0(k * r);
}

std::string_view to_string(ScatterRegion kind) {
  switch (kind) {
    case ScatterRegion::r1: return "R1";
    case ScatterRegion::r2: return "R2";
    case ScatterRegion::r3: return "R3";
    case ScatterRegion::custom: return "custom";
  }
  return "custom";
}

ScatterRegion scatter_region_from_string(std::string_view name) {
  if (name == "R1" || name == "r1") return ScatterRegion::r1;
  if (name == "R2" || name == "r2") return ScatterRegion::r2;
  if (name == "R3" || name == "r3") return ScatterRegion::r3;
  if (name == "custom") return ScatterRegion::custom;
  throw ConfigError("unknown scattering region '" + std::string(name) + "'");
}

double Region::area() const {
  double s = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % polygon.size()];
    s += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(s);
}

bool Region::contains(const Vec2& x, double tol) const {
  const std::size_t n = polygon.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    // On an edge counts as inside.
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    if ((a + t * ab - x).norm() <= tol) return true;
    if ((a[1] > x[1]) != (b[1] > x[1]) && x[0] < (b[0] - a[0]) * (x[1] - a[1]) / (b[1] - a[1]) + a[0]) inside = !inside;
  }
  return inside;
}

Rect Region::bounds() const {
  Rect r{polygon.at(0)[0], polygon[0][0], polygon[0][1], polygon[0][1]};
  for (const Vec2& p : polygon) {
    r.x1_lo = std::min(r.x1_lo, p[0]);
    r.x1_hi = std::max(r.x1_hi, p[0]);
    r.x2_lo = std::min(r.x2_lo, p[1]);
    r.x2_hi = std::max(r.x2_hi, p[1]);
  }
  return r;
}

namespace {

Mat2 rotation(double ang) {
  Mat2 R;
  R << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  return R;
}

// Angle by which the default region (built for a source on the negative
// x1 axis) turns so that it faces away from `source`.
double facing_angle(const Vec2& source) { return std::atan2(source[1], source[0]) - kPi; }

// Nearest angle of the form offset + k step; ties go to the smaller |angle|.
double snap(double ang, double step, double offset) {
  while (ang > kPi) ang -= 2 * kPi;
  while (ang <= -kPi) ang += 2 * kPi;
  const double k = (ang - offset) / step;
  const double lo = std::floor(k) * step + offset;
  const double hi = std::ceil(k) * step + offset;
  const double dlo = ang - lo;
  const double dhi = hi - ang;
  if (std::abs(dlo - dhi) < 1e-9) return std::abs(lo) <= std::abs(hi) ? lo : hi;
  return dlo < dhi ? lo : hi;
}

}  // namespace

Region make_region(ScatterRegion kind, const CloakSpec& spec, const Vec2& source) {
  spec.validate();
  const double s = spec.a;
  Region r;
  r.kind = kind;
  double ang = 0.0;
  switch (kind) {
    case ScatterRegion::r1: {
      const double n = std::max(2.0 * s, spec.outer());
      const double L = 8.0 * s;
      r.polygon = {{0, -L}, {L, -L}, {L, L}, {0, L}, {0, n}, {n, n}, {n, -n}, {0, -n}};
      ang = snap(facing_angle(source), 0.5 * kPi, 0.0);
      break;
    }
    case ScatterRegion::r2:
    case ScatterRegion::r3: {
      const double x0 = 2.0 * std::sqrt(2.0) * s;
      const double x1 = x0 + 4.0 * s;
      r.polygon = {{x0, -x0}, {x1, -x1}, {x1, x1}, {x0, x0}};
      ang = kind == ScatterRegion::r2 ? snap(facing_angle(source), 0.5 * kPi, 0.0)
                                      : snap(facing_angle(source), 0.5 * kPi, 0.25 * kPi);
      break;
    }
    case ScatterRegion::custom: throw DomainError("make_region: custom regions are given as polygons");
  }
  if (ang != 0.0) {
    const Mat2 R = rotation(ang);
    for (Vec2& p : r.polygon) p = R * p;
  }
  return r;
}

void check_region(const Region& r, const CloakSpec& spec, const Grid& grid) {
  if (r.polygon.size() < 3) throw GeometryError("region: polygon needs at least three vertices");
  const Rect in = grid.interior();
  for (const Vec2& p : r.polygon)
    if (!in.contains(p, 1e-9 * grid.h())) throw GeometryError("region: polygon reaches into the PML");
  // Sample the cloak square; no interior point of it may be inside R.
  const double b = spec.outer();
  const int m = 200;
  for (int i = 1; i < m; ++i)
    for (int j = 1; j < m; ++j) {
      const Vec2 x(-b + 2.0 * b * i / m, -b + 2.0 * b * j / m);
      if (r.contains(x, -1.0)) throw GeometryError("region: polygon overlaps the cloak");
    }
}

double scattering_measure(const ComplexField& u1, const std::function<Complex(const Vec2&)>& u2, const Region& r) {
  const Grid& g = u1.grid();
  const double h = g.h();
  const Rect bb = r.bounds();
  double num = 0.0;
  double den = 0.0;
  std::size_t cells = 0;
  for (int j = 0; j + 1 < g.n2(); ++j) {
    const double yc = g.node(0, j)[1] + 0.5 * h;
    if (yc < bb.x2_lo || yc > bb.x2_hi) continue;
    for (int i = 0; i + 1 < g.n1(); ++i) {
      const Vec2 c = g.node(i, j) + Vec2(0.5 * h, 0.5 * h);
      if (c[0] < bb.x1_lo || c[0] > bb.x1_hi) continue;
      if (!r.contains(c)) continue;
      if (g.in_pml(c)) throw GeometryError("scattering_measure: region reaches into the PML");
      const Complex v1 = 0.25 * (u1(i, j) + u1(i + 1, j) + u1(i, j + 1) + u1(i + 1, j + 1));
      const Complex v2 = u2(c);
      num += std::norm(v1 - v2);
      den += std::norm(v2);
      ++cells;
    }
  }
  if (cells == 0) throw DomainError("scattering_measure: region contains no grid cells");
  if (!(den > 0.0)) throw DomainError("scattering_measure: reference field vanishes on the region");
  return num / den;
}

double scattering_measure(const ComplexField& u1, const ComplexField& u2, const Region& r) {
  if (!(u1.grid() == u2.grid())) throw DomainError("scattering_measure: fields live on different grids");
  const Grid& g = u2.grid();
  const double h = g.h();
  auto ref = [&](const Vec2& c) {
    const long i = std::lround((c[0] - 0.5 * h) / h) - g.origin_index1();
    const long j = std::lround((c[1] - 0.5 * h) / h) - g.origin_index2();
    const int ii = static_cast<int>(i);
    const int jj = static_cast<int>(j);
    return 0.25 * (u2(ii, jj) + u2(ii + 1, jj) + u2(ii, jj + 1) + u2(ii + 1, jj + 1));
  };
  return scattering_measure(u1, ref, r);
}

double quality_factor(double E_uncloaked, double E_cloaked) {
  if (!(E_uncloaked > 0.0)) throw DomainError("quality_factor: uncloaked measure must be positive");
  return std::abs(E_uncloaked - E_cloaked) / E_uncloaked;
}

std::vector<ProfilePoint> fringe_profile(const ComplexField& u, const Vec2& p0, const Vec2& p1, int samples) {
  if (samples < 2) throw DomainError("fringe_profile: need at least two samples");
  const Grid& g = u.grid();
  const double h = g.h();
  std::vector<ProfilePoint> out;
  out.reserve(static_cast<std::size_t>(samples));
  const double len = (p1 - p0).norm();
  for (int k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / (samples - 1);
    const Vec2 x = p0 + t * (p1 - p0);
    const double f1 = x[0] / h - static_cast<double>(g.origin_index1());
    const double f2 = x[1] / h - static_cast<double>(g.origin_index2());
    const int i = std::clamp(static_cast<int>(std::floor(f1)), 0, g.n1() - 2);
    const int j = std::clamp(static_cast<int>(std::floor(f2)), 0, g.n2() - 2);
    const double t1 = f1 - i;
    const double t2 = f2 - j;
    if (t1 < -1e-9 || t2 < -1e-9 || t1 > 1 + 1e-9 || t2 > 1 + 1e-9) throw DomainError("fringe_profile: screen leaves the grid");
    const double m = (1 - t1) * (1 - t2) * std::abs(u(i, j)) + t1 * (1 - t2) * std::abs(u(i + 1, j)) +
                     (1 - t1) * t2 * std::abs(u(i, j + 1)) + t1 * t2 * std::abs(u(i + 1, j + 1));
    out.push_back({t * len, m});
  }
  return out;
}

double profile_correlation(const std::vector<ProfilePoint>& a, const std::vector<ProfilePoint>& b) {
  if (a.size() != b.size() || a.size() < 2) throw DomainError("profile_correlation: profiles must match in length");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i].magnitude;
    mb += b[i].magnitude;
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i].magnitude - ma;
    const double db = b[i].magnitude - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return saa == sbb ? 1.0 : 0.0;
  return sab / std::sqrt(saa * sbb);
}

int count_local_maxima(const std::vector<ProfilePoint>& p, double prominence) {
  double peak = 0.0;
  for (const ProfilePoint& q : p) peak = std::max(peak, q.magnitude);
  const double margin = prominence * peak;
  int count = 0;
  // A maximum must rise above the lowest value on each side before the next higher point.
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double v = p[i].magnitude;
    if (!(v > p[i - 1].magnitude && v >= p[i + 1].magnitude)) continue;
    double left_min = v, right_min = v;
    for (std::size_t k = i; k-- > 0;) {
      if (p[k].magnitude > v) break;
      left_min = std::min(left_min, p[k].magnitude);
    }
    for (std::size_t k = i + 1; k < p.size(); ++k) {
      if (p[k].magnitude > v) break;
      right_min = std::min(right_min, p[k].magnitude);
    }
    if (v - left_min >= margin && v - right_min >= margin) ++count;
  }
  return count;
}

void write_measure_header(std::ostream& out) {
  out << "scenario,omega,source_x1,source_x2,region,E_baseline,E_uncloaked,E_cloaked,Q\n";
}

void write_measure_row(std::ostream& out, const MeasureReport& r) {
  csv::write_row(out, {r.scenario, csv::num(r.omega), csv::num(r.source[0]), csv::num(r.source[1]),
                       std::string(to_string(r.region)), csv::num(r.E_baseline), csv::num(r.E_uncloaked),
                       csv::num(r.E_cloaked), csv::num(r.Q)});
}

}  // namespace cloaksim
