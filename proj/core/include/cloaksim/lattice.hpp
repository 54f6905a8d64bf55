#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cloaksim/cloak_map.hpp"

namespace cloaksim {

class Grid;

struct EigenSample {
  double lambda1 = 1.0;  // lambda1 >= lambda2
  double lambda2 = 1.0;
  Vec2 e1 = Vec2(0, 1);
  Vec2 e2 = Vec2(1, 0);
  Vec2 position = Vec2::Zero();

  /// P^T Lambda P with the eigenvectors as rows of P.
  Mat2 reconstruct() const;
};

/// Closed-form eigen-decomposition of a symmetric positive definite 2x2
/// tensor. e1 is oriented to have a nonnegative component along
/// `reference` (the face-parallel axis); e2 is e1 rotated by -90 degrees.
/// For coincident eigenvalues e1 is the reference axis itself.
EigenSample eigendecompose(const Mat2& C, const Vec2& reference = Vec2(0, 1));

/// Axis parallel to the outer face of trapezoid `side`.
Vec2 face_parallel(int side);

/// Eigen-decomposition of the cloak stiffness at x, oriented by its face.
EigenSample principal_axes(const CloakSpec& spec, const Vec2& x);

struct LatticeNode {
  Vec2 x = Vec2::Zero();
  double mass = 0.0;
  double area = 0.0;  // part of the unit cell inside the frame
  long p1 = 0;  // x = ell * (p1, p2)
  long p2 = 0;
};

/// Straight link between two nearest-neighbour nodes. The link equation
/// uses share * stiffness / length; share is 1/2 for links running along
/// the inner or outer boundary, which carry only one adjacent lattice cell.
struct LatticeLink {
  int a = 0;
  int b = 0;
  double stiffness = 0.0;
  double length = 0.0;
  double share = 1.0;
  bool parallel = false;  // parallel to the outer face of its trapezoid

  double effective() const { return share * stiffness; }
};

enum class LatticeKind { refined, basic, uniform };

std::string_view to_string(LatticeKind kind);

/// Neighbour type in one of the four lattice directions of a node.
enum class Neighbour { lattice, continuum, inclusion, free };

std::string_view to_string(Neighbour n);

/// Coupling record for a node on the inner or outer boundary of the frame.
struct BoundaryStencil {
  int node = 0;
  std::size_t grid_index = 0;
  std::array<Neighbour, 4> dirs{};  // +x1, +x2, -x1, -x2
};

struct LatticeGraph {
  LatticeKind kind = LatticeKind::refined;
  CloakSpec spec;
  double ell = 0.0;
  std::vector<LatticeNode> nodes;
  std::vector<LatticeLink> links;
  std::vector<BoundaryStencil> boundary_stencils;

  double total_mass() const;
};

/// Regular square lattice whose nodes are ell * Z^2 inside the closed frame.
/// Link stiffness is ell times the stiffness eigenvalue at the link
/// midpoint: lambda1 for links parallel to the outer face, lambda2 for the
/// perpendicular ones. Node mass integrates rho over the ell-square centred
/// at the node, clipped to the frame. Throws GeometryError unless both a and
/// w are multiples of ell.
LatticeGraph build_refined(const CloakSpec& spec, double ell);

/// Homogeneous orthotropic lattice: stiffnesses ell * lambda(a+w, 0) of
/// side 1 on every side and mass density rho (1 + a/w).
LatticeGraph build_basic(const CloakSpec& spec, double ell);

/// Every link ell * mu, density rho: the lattice form of the ambient medium.
LatticeGraph build_uniform(const CloakSpec& spec, double ell);

/// Grid index of every lattice node plus the boundary records. Throws
/// GeometryError if ell differs from the grid spacing or a node is off-grid.
struct LatticeEmbedding {
  std::vector<std::size_t> grid_index;
  std::vector<BoundaryStencil> stencils;
};

LatticeEmbedding couple(const LatticeGraph& lattice, const Grid& grid);

struct PrincipalCurve {
  int side = 1;
  int family = 1;  // follows e1 or e2
  std::vector<Vec2> points;
};

struct PrincipalNode {
  Vec2 x = Vec2::Zero();
  int curve_a = 0;  // family-1 curve
  int curve_b = 0;  // family-2 curve
  double cos_field = 0.0;  // |e1 . e2| of the tangent fields at x
  double cos_chord = 0.0;  // |cos| between the two crossing chords
};

struct PrincipalLattice {
  std::vector<PrincipalCurve> curves;
  std::vector<PrincipalNode> nodes;
};

/// Traces both eigenvector fields from every seed, in both directions, with
/// RK4 steps of length dtau, stopping after `steps` steps or when the curve
/// leaves the seed's trapezoid (clipped at its boundary).
PrincipalLattice principal_lattice(const CloakSpec& spec, const std::vector<Vec2>& seeds, double dtau, int steps);

/// Seeds spread along the outer faces and the mid-axes of the trapezoids.
std::vector<Vec2> default_principal_seeds(const CloakSpec& spec, int per_face);

void write_lattice_nodes_csv(std::ostream& out, const LatticeGraph& g);
void write_lattice_links_csv(std::ostream& out, const LatticeGraph& g);
/// `curve,side,family,x1,x2` rows.
void write_principal_csv(std::ostream& out, const PrincipalLattice& p);

}  // namespace cloaksim
