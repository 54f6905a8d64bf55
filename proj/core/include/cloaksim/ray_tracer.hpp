#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "cloaksim/cloak_map.hpp"

namespace cloaksim {

struct RayState {
  Vec2 x = Vec2::Zero();
  Vec2 s = Vec2::Zero();  // slowness
  RegionTag region;
  double t = 0.0;
};

enum class RayEventKind { enter_cloak, internal_diagonal, exit_cloak, truncated };

std::string_view to_string(RayEventKind kind);

/// Interface crossing. Directions are dx/dt on either side; gradients are
/// tangential/normal components of those directions in the frame of the
/// crossed interface, so they stay finite for any transversal crossing.
struct RayEvent {
  RayEventKind kind = RayEventKind::enter_cloak;
  double t = 0.0;
  Vec2 x = Vec2::Zero();
  RegionTag from;
  RegionTag to;
  Vec2 dir_in = Vec2::Zero();
  Vec2 dir_out = Vec2::Zero();
  double grad_in = 0.0;
  double grad_out = 0.0;

  /// Tangential direction component reverses sign across the interface.
  bool negative_refraction() const { return grad_in * grad_out < 0.0; }
};

/// Polyline of ray states plus its interface events. At every event the
/// crossing point appears twice, once evaluated in each adjacent region.
struct RayPath {
  Vec2 source = Vec2::Zero();
  Vec2 direction = Vec2::Zero();
  std::vector<RayState> polyline;
  std::vector<RayEvent> events;
  bool truncated = false;
};

/// x(t) = F(X0 + t N), the image of the straight undeformed ray.
Vec2 exact_position(const CloakSpec& spec, const Vec2& source, const Vec2& N, double t);

/// Image of the undeformed ray, sampled adaptively inside the cloak and
/// straight in the ambient medium. Throws DomainError if the source is not
/// in the ambient region, N is not a unit vector, or the undeformed line
/// meets the pre-image square (such rays end on the inner boundary).
RayPath trace_exact(const CloakSpec& spec, const Vec2& source, const Vec2& N, double t_max);

/// Integrates the characteristic system with adaptive RK4. The ray
/// parameter is rescaled so that it coincides with the one of trace_exact.
/// Step-size underflow ends the path with a truncated event.
RayPath trace_ode(const CloakSpec& spec, const Vec2& source, const Vec2& N, double t_max, double tol);

/// H(x, s) = (mu/rho) |J^T s|^2 - 1.
double hamiltonian(const CloakSpec& spec, const Vec2& x, const Vec2& s, int side);

/// Gradient dx2/dx1 just inside the right face where a ray leaves the cloak
/// at (a+w, x2_exit), given the gradient M of the straight ambient ray.
double exit_gradient(const CloakSpec& spec, double x2_exit, double M);

/// Closed inequalities for m* M < 0 on the right face, written without
/// evaluating m*.
bool negative_refraction_inequality(const CloakSpec& spec, double x2_exit, double M);

/// Axial source position below which rays leaving the far face are
/// negatively refracted: X1 < -(a+w) w / (a-eps).
double axial_threshold(const CloakSpec& spec);

/// A thin cloak refracts negatively for every axial source outside it.
bool thin_cloak(const CloakSpec& spec);

struct FaceRefraction {
  int face = 0;            // 1 right, 2 top, 3 left, 4 bottom
  int exiting_rays = 0;    // sampled rays leaving through this face
  int negative_rays = 0;
  bool negative() const { return negative_rays > 0; }
};

struct RefractionReport {
  Vec2 source = Vec2::Zero();
  std::array<FaceRefraction, 4> faces{};
  bool any() const;
};

/// Per face, whether any ray from the source leaving through that face is
/// negatively refracted. Rays whose undeformed line meets the pre-image
/// square are excluded. `samples` exit points are tested per face.
RefractionReport negative_refraction_predicate(const CloakSpec& spec, const Vec2& source, int samples = 2001);

/// Writes `t,x1,x2,s1,s2,region` rows (with header).
void write_ray_csv(std::ostream& out, const RayPath& path);

}  // namespace cloaksim
