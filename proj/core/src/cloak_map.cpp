#include "cloaksim/cloak_map.hpp"

#include <cmath>
#include <sstream>

namespace cloaksim {

namespace {

double inf_norm(const Vec2& x) { return std::max(std::abs(x[0]), std::abs(x[1])); }

// Every trapezoid is the side-1 formula written in local coordinates
// (normal, tangential), with beta = +alpha2 on the positive faces and
// -alpha2 on the negative ones. Sides 2 and 4 swap the two axes.
struct SideFrame {
  bool swap;
  double beta;
};

SideFrame frame_of(const CloakSpec& spec, int side) {
  const double a2 = spec.alpha2();
  switch (side) {
    case 1: return {false, a2};
    case 2: return {true, a2};
    case 3: return {false, -a2};
    case 4: return {true, -a2};
    default: throw DomainError("trapezoid index must be in 1..4");
  }
}

Vec2 to_local(const Vec2& x, bool swap) { return swap ? Vec2(x[1], x[0]) : x; }

Mat2 to_global(const Mat2& m, bool swap) {
  if (!swap) return m;
  Mat2 r;
  r << m(1, 1), m(1, 0), m(0, 1), m(0, 0);
  return r;
}

}  // namespace

std::string_view to_string(InnerBoundary bc) {
  switch (bc) {
    case InnerBoundary::transmission: return "transmission";
    case InnerBoundary::neumann: return "neumann";
    case InnerBoundary::dirichlet: return "dirichlet";
  }
  return "transmission";
}

InnerBoundary inner_boundary_from_string(std::string_view name) {
  if (name == "transmission") return InnerBoundary::transmission;
  if (name == "neumann") return InnerBoundary::neumann;
  if (name == "dirichlet") return InnerBoundary::dirichlet;
  throw ConfigError("unknown inner boundary condition '" + std::string(name) + "'");
}

void CloakSpec::validate() const {
  if (!(a > 0.0)) throw DomainError("cloak: a must be positive");
  if (!(w > 0.0)) throw DomainError("cloak: w must be positive");
  if (!(eps > 0.0) || eps > a) throw DomainError("cloak: eps must satisfy 0 < eps <= a");
  if (!(mu > 0.0) || !(rho > 0.0)) throw DomainError("cloak: ambient mu and rho must be positive");
  if (!(mu0 >= 0.0) || !(rho0 >= 0.0)) throw DomainError("cloak: inclusion mu0 and rho0 must be non-negative");
}

double CloakSpec::wave_speed() const { return std::sqrt(mu / rho); }

double default_eps(double a) { return 1e-6 * (a / 0.5); }

std::string to_string(const RegionTag& tag) {
  switch (tag.kind) {
    case RegionKind::ambient: return "ambient";
    case RegionKind::inclusion: return "inclusion";
    case RegionKind::trapezoid: return "trapezoid" + std::to_string(tag.side);
  }
  return "ambient";
}

int side_of(const Vec2& x) {
  const double ax = std::abs(x[0]);
  const double ay = std::abs(x[1]);
  if (x[0] >= 0.0 && ay <= ax) return 1;
  if (x[1] >= 0.0 && ax <= ay) return 2;
  if (x[0] <= 0.0 && ay <= ax) return 3;
  return 4;
}

bool in_frame(const CloakSpec& spec, const Vec2& x) {
  const double r = inf_norm(x);
  return r >= spec.a && r <= spec.outer();
}

RegionTag classify(const CloakSpec& spec, const Vec2& x) {
  const double r = inf_norm(x);
  if (r < spec.a) return {RegionKind::inclusion, 0};
  if (r <= spec.outer()) return {RegionKind::trapezoid, side_of(x)};
  return {RegionKind::ambient, 0};
}

Vec2 forward_map_side(const CloakSpec& spec, const Vec2& X, int side) {
  const auto [swap, beta] = frame_of(spec, side);
  const double a1 = spec.alpha1();
  const Vec2 Y = to_local(X, swap);
  if (Y[0] == 0.0) throw DomainError("forward_map: normal coordinate vanishes");
  const Vec2 y(a1 * Y[0] + beta, a1 * Y[1] + beta * Y[1] / Y[0]);
  return to_local(y, swap);
}

Vec2 forward_map(const CloakSpec& spec, const Vec2& X) {
  const double r = inf_norm(X);
  if (r >= spec.outer()) return X;
  if (r < spec.eps) throw DomainError("forward_map: point lies inside the pre-image square");
  return forward_map_side(spec, X, side_of(X));
}

Vec2 inverse_map_side(const CloakSpec& spec, const Vec2& x, int side) {
  const auto [swap, beta] = frame_of(spec, side);
  const double a1 = spec.alpha1();
  const Vec2 y = to_local(x, swap);
  if (y[0] == 0.0) throw DomainError("inverse_map: normal coordinate vanishes");
  const double Yn = (y[0] - beta) / a1;
  return to_local(Vec2(Yn, y[1] * Yn / y[0]), swap);
}

Vec2 inverse_map(const CloakSpec& spec, const Vec2& x) {
  const double r = inf_norm(x);
  if (r >= spec.outer()) return x;
  if (r < spec.a) throw DomainError("inverse_map: point lies inside the inclusion");
  return inverse_map_side(spec, x, side_of(x));
}

JacobianSample jacobian_side(const CloakSpec& spec, const Vec2& x, int side) {
  const auto [swap, beta] = frame_of(spec, side);
  const double a1 = spec.alpha1();
  const Vec2 y = to_local(x, swap);
  const double yn = y[0];
  const double yt = y[1];
  Mat2 J;
  J << a1, 0.0, yt * a1 * beta / (yn * (beta - yn)), yn * a1 / (yn - beta);
  JacobianSample out;
  out.J = to_global(J, swap);
  out.detJ = yn * a1 * a1 / (yn - beta);
  return out;
}

JacobianSample jacobian(const CloakSpec& spec, const Vec2& x) {
  const RegionTag tag = classify(spec, x);
  if (tag.kind == RegionKind::inclusion) throw DomainError("jacobian: point lies inside the inclusion");
  if (tag.kind == RegionKind::ambient) return {};
  return jacobian_side(spec, x, tag.side);
}

std::array<Mat2, 2> jacobian_gradient_side(const CloakSpec& spec, const Vec2& x, int side) {
  const auto [swap, beta] = frame_of(spec, side);
  const double a1 = spec.alpha1();
  const Vec2 y = to_local(x, swap);
  const double yn = y[0];
  const double yt = y[1];
  const double d = beta - yn;

  // Local derivatives with respect to (y_n, y_t); only the second row varies.
  Mat2 dn = Mat2::Zero();
  Mat2 dt = Mat2::Zero();
  dn(1, 0) = yt * a1 * beta * (2.0 * yn - beta) / (yn * yn * d * d);
  dn(1, 1) = -a1 * beta / (d * d);
  dt(1, 0) = a1 * beta / (yn * d);

  if (!swap) return {dn, dt};
  // For swapped sides x_1 is the tangential coordinate.
  return {to_global(dt, true), to_global(dn, true)};
}

MaterialSample material_side(const CloakSpec& spec, const Vec2& x, int side) {
  const JacobianSample js = jacobian_side(spec, x, side);
  MaterialSample m;
  m.J = js.J;
  m.detJ = js.detJ;
  m.C = (spec.mu / js.detJ) * (js.J * js.J.transpose());
  m.C(1, 0) = m.C(0, 1);
  m.rho = spec.rho / js.detJ;
  return m;
}

MaterialSample material(const CloakSpec& spec, const Vec2& x) {
  const RegionTag tag = classify(spec, x);
  if (tag.kind == RegionKind::inclusion) throw DomainError("material: point lies inside the inclusion");
  if (tag.kind == RegionKind::ambient) {
    MaterialSample m;
    m.C = spec.mu * Mat2::Identity();
    m.rho = spec.rho;
    return m;
  }
  return material_side(spec, x, tag.side);
}

Mat2 metric(const Mat2& J) { return (J * J.transpose()).inverse(); }

}  // namespace cloaksim
