#pragma once

#include <array>
#include <string>
#include <string_view>

#include "cloaksim/types.hpp"

namespace cloaksim {

enum class InnerBoundary { transmission, neumann, dirichlet };

std::string_view to_string(InnerBoundary bc);
InnerBoundary inner_boundary_from_string(std::string_view name);

/// Geometric and material parameters of one regularised square cloak.
///
/// The inclusion is the square |x|_inf < a, the cloak is the frame
/// a <= |x|_inf <= a + w, and the pre-image of the inclusion is the small
/// square |X|_inf < eps.
struct CloakSpec {
  double a = 0.5;
  double w = 0.5;
  double eps = 1e-6;
  double mu = 1.0;
  double rho = 1.0;
  double mu0 = 0.1;
  double rho0 = 0.0;
  InnerBoundary inner_bc = InnerBoundary::transmission;

  /// Throws DomainError unless a > 0, w > 0, 0 < eps <= a and the material
  /// constants are admissible. eps == a is accepted: it is the identity map.
  void validate() const;

  double outer() const { return a + w; }
  double alpha1() const { return w / (a + w - eps); }
  double alpha2() const { return (a + w) * (a - eps) / (a + w - eps); }
  double wave_speed() const;
};

/// eps = 1e-6 for the a = 0.5 reference geometry, scaled with a.
double default_eps(double a);

enum class RegionKind { ambient, trapezoid, inclusion };

struct RegionTag {
  RegionKind kind = RegionKind::ambient;
  int side = 0;  // 1..4 for trapezoids, 0 otherwise

  bool operator==(const RegionTag&) const = default;
};

std::string to_string(const RegionTag& tag);

/// Index of the angular sector around the origin: 1 right, 2 top, 3 left,
/// 4 bottom. Points on the diagonals |x1| = |x2| go to the lower index.
/// The origin itself maps to 1.
int side_of(const Vec2& x);

/// Deformed-configuration classification (inclusion open, frame closed).
RegionTag classify(const CloakSpec& spec, const Vec2& x);

bool in_frame(const CloakSpec& spec, const Vec2& x);

Vec2 forward_map(const CloakSpec& spec, const Vec2& X);
Vec2 inverse_map(const CloakSpec& spec, const Vec2& x);

/// Inverse map using the formula of a given trapezoid, regardless of which
/// sector x lies in. Used to check continuity across internal diagonals.
Vec2 inverse_map_side(const CloakSpec& spec, const Vec2& x, int side);
Vec2 forward_map_side(const CloakSpec& spec, const Vec2& X, int side);

struct JacobianSample {
  Mat2 J = Mat2::Identity();  // J_ij = dx_i / dX_j, expressed in x
  double detJ = 1.0;
};

struct MaterialSample {
  Mat2 C = Mat2::Identity();
  double rho = 1.0;
  Mat2 J = Mat2::Identity();
  double detJ = 1.0;
};

JacobianSample jacobian(const CloakSpec& spec, const Vec2& x);
JacobianSample jacobian_side(const CloakSpec& spec, const Vec2& x, int side);

/// dJ/dx_k for k = 0, 1 using the closed-form trapezoid formulas.
std::array<Mat2, 2> jacobian_gradient_side(const CloakSpec& spec, const Vec2& x, int side);

MaterialSample material(const CloakSpec& spec, const Vec2& x);
MaterialSample material_side(const CloakSpec& spec, const Vec2& x, int side);

/// g = (J J^T)^-1
Mat2 metric(const Mat2& J);

}  // namespace cloaksim
