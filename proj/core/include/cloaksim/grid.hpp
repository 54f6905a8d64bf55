#pragma once

#include <cstddef>

#include "cloaksim/types.hpp"

namespace cloaksim {

struct Rect {
  double x1_lo = 0.0;
  double x1_hi = 0.0;
  double x2_lo = 0.0;
  double x2_hi = 0.0;

  bool contains(const Vec2& x, double tol = 0.0) const {
    return x[0] >= x1_lo - tol && x[0] <= x1_hi + tol && x[1] >= x2_lo - tol && x[1] <= x2_hi + tol;
  }
  Rect expanded(double d) const { return {x1_lo - d, x1_hi + d, x2_lo - d, x2_hi + d}; }
  Rect united(const Rect& o) const;
};

struct PmlSpec {
  int cells = 20;
  double reflection = 1e-6;  // theoretical normal-incidence reflection
  double power = 2.0;        // sigma(d) = sigma_max (d / D)^power

  bool operator==(const PmlSpec&) const = default;
};

/// Uniform node-based grid. Node (i, j) sits at origin + h (i, j); the
/// outermost `pml.cells` node layers on every side form the absorbing layer
/// and the boundary nodes carry u = 0.
///
/// Node coordinates are integer multiples of h, so any geometry whose
/// features are multiples of h lands on grid lines.
class Grid {
 public:
  Grid() = default;

  /// Smallest h-aligned grid whose interior (non-PML) part covers `interior`.
  static Grid covering(const Rect& interior, double h, const PmlSpec& pml, double wave_speed);

  double h() const { return h_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_); }
  const PmlSpec& pml() const { return pml_; }
  double sigma_max() const { return sigma_max_; }
  long origin_index1() const { return i0_; }
  long origin_index2() const { return j0_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n1_) + static_cast<std::size_t>(i);
  }
  Vec2 node(int i, int j) const { return {h_ * static_cast<double>(i0_ + i), h_ * static_cast<double>(j0_ + j)}; }

  /// Interior (non-PML) rectangle.
  Rect interior() const;
  Rect extent() const;

  bool in_pml(const Vec2& x) const;
  /// Damping profile along each axis at x (zero outside the PML).
  Vec2 sigma(const Vec2& x) const;
  /// Complex coordinate stretch factors s_k = 1 + i sigma_k / omega.
  std::pair<Complex, Complex> stretch(const Vec2& x, double omega) const;

  /// Nearest node indices (clamped to the grid).
  std::pair<int, int> nearest(const Vec2& x) const;

  bool operator==(const Grid&) const = default;

 private:
  double h_ = 0.0;
  int n1_ = 0;
  int n2_ = 0;
  long i0_ = 0;  // node (0,0) is at h * (i0_, j0_)
  long j0_ = 0;
  PmlSpec pml_;
  double sigma_max_ = 0.0;
};

}  // namespace cloaksim
