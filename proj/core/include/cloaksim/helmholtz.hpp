#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Sparse>

#include "cloaksim/cloak_map.hpp"
#include "cloaksim/grid.hpp"
#include "cloaksim/lattice.hpp"

namespace cloaksim {

struct PointSource {
  Vec2 x0 = Vec2(-3.0, 0.0);
  Complex amplitude{1.0, 0.0};
};

/// Line source on x1 = x1_line spanning the whole grid height; radiates
/// amplitude * exp(i k |x1 - x1_line|) in the ambient medium.
struct PlaneWaveSource {
  double x1_line = -3.0;
  Complex amplitude{1.0, 0.0};
};

using Source = std::variant<PointSource, PlaneWaveSource>;

/// Axis-aligned wall along the segment p0-p1, `thickness_cells` cells thick.
/// Neumann walls are removed from the medium, Dirichlet walls pin u = 0.
struct Barrier {
  Vec2 p0 = Vec2::Zero();
  Vec2 p1 = Vec2::Zero();
  InnerBoundary bc = InnerBoundary::neumann;
  double thickness_cells = 2.0;
};

struct Scenario {
  CloakSpec spec;
  bool cloak_enabled = false;
  bool inclusion_enabled = true;
  Source source = PointSource{};
  double omega = 5.0;
  std::optional<LatticeGraph> lattice;  // replaces the continuum frame
  std::vector<Barrier> barriers;
  std::string label;

  /// True when anything (inclusion, cloak or lattice) occupies the frame square.
  bool has_structure() const { return inclusion_enabled || cloak_enabled || lattice.has_value(); }
  void validate() const;
};

/// Smallest phase speed of the medium inside the cloak frame.
double min_frame_speed(const Scenario& sc);

/// Wavelength-based resolution and placement checks shared by assemble and
/// the grid planners. Throws ResolutionError / GeometryError.
void check_grid(const Scenario& sc, const Grid& grid);
double points_per_wavelength(const Scenario& sc, const Grid& grid);

/// omega-independent material samples of every cell.
struct CellSamples {
  enum Kind : std::uint8_t { continuum = 0, void_cell = 1, lattice_cell = 2, cloak_cell = 3 };
  std::vector<std::uint8_t> kind;
  // Per cell, slots 6..9 hold rho at the quarter-cell centres (order 00,
  // 10, 01, 11). Continuum cells: A11 at the bottom and top half-face
  // points, A22 at the left and right ones, mean A12 in slots 0..4.
  // Cloak cells: (A11, A22, A12) at the centroids of the two triangles in
  // slots 0..2 and 3..5.
  std::vector<std::array<double, 10>> data;
};

CellSamples sample_cells(const Scenario& sc, const Grid& grid);

struct LinearSystem {
  Grid grid;
  double omega = 0.0;
  Eigen::SparseMatrix<Complex> A;  // column-major
  Eigen::VectorXcd b;
  std::vector<std::uint8_t> pinned;
  std::map<std::string, std::string> meta;
};

LinearSystem assemble(const Scenario& sc, const Grid& grid);
LinearSystem assemble(const Scenario& sc, const Grid& grid, const CellSamples& samples);

struct SolveOptions {
  double target_residual = 1e-8;
  std::size_t direct_limit = 4'000'000;  // unknowns
  int refinement_steps = 4;
  int iterative_max = 2000;
};

class ComplexField {
 public:
  ComplexField() = default;
  ComplexField(Grid grid, Eigen::VectorXcd values, double omega);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  double omega() const { return omega_; }
  Complex operator()(int i, int j) const { return values_[static_cast<Eigen::Index>(grid_.index(i, j))]; }
  /// Bilinear interpolation; throws DomainError outside the grid.
  Complex at(const Vec2& x) const;

  std::map<std::string, std::string> meta;
  std::vector<double> residual_trace;

 private:
  Grid grid_;
  Eigen::VectorXcd values_;
  double omega_ = 0.0;
};

ComplexField solve(const LinearSystem& sys, const SolveOptions& opts = {});
ComplexField run_scenario(const Scenario& sc, const Grid& grid, const SolveOptions& opts = {});

/// Field dump `x1,x2,re_u,im_u,region`, every `stride`-th node per axis.
void write_field_csv(std::ostream& out, const ComplexField& u, const Scenario& sc, int stride = 1);

}  // namespace cloaksim
