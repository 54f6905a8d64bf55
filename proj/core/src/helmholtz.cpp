#include "cloaksim/helmholtz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <sstream>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/UmfPackSupport>

#include "cloaksim/csv.hpp"

namespace cloaksim {

namespace {

double inf_norm(const Vec2& x) { return std::max(std::abs(x[0]), std::abs(x[1])); }

Rect barrier_rect(const Barrier& b, double h) {
  const double half = 0.5 * b.thickness_cells * h;
  if (b.p0[0] == b.p1[0]) {
    return {b.p0[0] - half, b.p0[0] + half, std::min(b.p0[1], b.p1[1]), std::max(b.p0[1], b.p1[1])};
  }
  return {std::min(b.p0[0], b.p1[0]), std::max(b.p0[0], b.p1[0]), b.p0[1] - half, b.p0[1] + half};
}

// Corner ids of the two triangles of a cell, corner k at offset (k & 1, k >> 1).
// Cells in the first and third quadrants split along their main diagonal,
// the others along the anti-diagonal, matching the cloak diagonals.
std::array<std::array<int, 3>, 2> cell_triangles(const Vec2& centre) {
  if (centre[0] * centre[1] > 0.0) return {{{0, 1, 3}, {0, 3, 2}}};
  return {{{0, 1, 2}, {1, 3, 2}}};
}

// P1 element stiffness area * G^T A G of a constant tensor A.
Eigen::Matrix3d triangle_stiffness(const Mat2& A, const std::array<int, 3>& v, double h) {
  Vec2 p[3];
  for (int k = 0; k < 3; ++k) p[k] = h * Vec2(v[static_cast<std::size_t>(k)] & 1, v[static_cast<std::size_t>(k)] >> 1);
  const double det = (p[1] - p[0])[0] * (p[2] - p[0])[1] - (p[1] - p[0])[1] * (p[2] - p[0])[0];
  Eigen::Matrix<double, 2, 3> G;
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = p[(k + 2) % 3] - p[(k + 1) % 3];
    G.col(k) = Vec2(e[1], -e[0]) / det;
  }
  return 0.5 * std::abs(det) * G.transpose() * A * G;
}

}  // namespace

void Scenario::validate() const {
  spec.validate();
  if (!(omega > 0.0)) throw DomainError("scenario: omega must be positive");
  if (lattice && !(lattice->spec.a == spec.a && lattice->spec.w == spec.w))
    throw GeometryError("scenario: lattice was built for a different cloak geometry");
  for (const Barrier& b : barriers) {
    if (b.p0[0] != b.p1[0] && b.p0[1] != b.p1[1]) throw GeometryError("scenario: barriers must be axis-aligned");
    if (!(b.thickness_cells > 0.0)) throw GeometryError("scenario: barrier thickness must be positive");
    if (b.bc == InnerBoundary::transmission) throw GeometryError("scenario: barriers must be neumann or dirichlet");
  }
  if (const auto* ps = std::get_if<PointSource>(&source)) {
    if (has_structure() && !(inf_norm(ps->x0) > spec.outer()))
      throw GeometryError("scenario: point source must lie in the ambient region");
  } else {
    const auto& pw = std::get<PlaneWaveSource>(source);
    if (has_structure() && std::abs(pw.x1_line) <= spec.outer())
      throw GeometryError("scenario: plane-wave source line crosses the cloak");
  }
}

double min_frame_speed(const Scenario& sc) {
  const CloakSpec& s = sc.spec;
  double cmin = s.wave_speed();
  if (sc.inclusion_enabled && s.inner_bc == InnerBoundary::transmission && s.rho0 > 0.0 && s.mu0 > 0.0)
    cmin = std::min(cmin, std::sqrt(s.mu0 / s.rho0));
  if (sc.lattice) {
    const LatticeGraph& g = *sc.lattice;
    for (const LatticeLink& l : g.links) {
      for (int id : {l.a, l.b}) {
        const LatticeNode& n = g.nodes[static_cast<std::size_t>(id)];
        if (n.area <= 0.0) continue;
        const double density = n.mass / n.area;
        cmin = std::min(cmin, std::sqrt(l.stiffness / (l.length * density)));
      }
    }
    return cmin;
  }
  if (sc.cloak_enabled) {
    // Side 1 covers every trapezoid by symmetry.
    const int m = 64;
    for (int p = 0; p <= m; ++p) {
      const double x1 = s.a + s.w * p / m;
      for (int q = 0; q <= m; ++q) {
        const double x2 = -x1 + 2.0 * x1 * q / m;
        const Mat2 J = jacobian_side(s, Vec2(x1, x2), 1).J;
        const double lmin = Eigen::SelfAdjointEigenSolver<Mat2>(J * J.transpose()).eigenvalues()[0];
        cmin = std::min(cmin, s.wave_speed() * std::sqrt(lmin));
      }
    }
  }
  return cmin;
}

double points_per_wavelength(const Scenario& sc, const Grid& grid) {
  return 2.0 * kPi * min_frame_speed(sc) / (sc.omega * grid.h());
}

void check_grid(const Scenario& sc, const Grid& grid) {
  const double ppw = points_per_wavelength(sc, grid);
  if (ppw < 10.0) {
    std::ostringstream os;
    os << "grid resolves the shortest wavelength with " << ppw << " points (need >= 10)";
    throw ResolutionError(os.str());
  }
  const Rect in = grid.interior();
  const double h = grid.h();
  if (sc.has_structure()) {
    const double r = sc.spec.outer();
    const Rect guard = in.expanded(-10.0 * h + 1e-9 * h);
    if (!(guard.contains(Vec2(-r, -r)) && guard.contains(Vec2(r, r))))
      throw GeometryError("cloak must stay at least 10 cells away from the PML");
  }
  if (const auto* ps = std::get_if<PointSource>(&sc.source)) {
    if (!in.contains(ps->x0)) throw GeometryError("point source lies in the PML or outside the grid");
  } else {
    const auto& pw = std::get<PlaneWaveSource>(sc.source);
    if (pw.x1_line <= in.x1_lo || pw.x1_line >= in.x1_hi) throw GeometryError("plane-wave line lies in the PML");
  }
}

CellSamples sample_cells(const Scenario& sc, const Grid& grid) {
  const CloakSpec& s = sc.spec;
  const int c1 = grid.n1() - 1;
  const int c2 = grid.n2() - 1;
  const double h = grid.h();
  CellSamples out;
  const std::size_t ncell = static_cast<std::size_t>(c1) * static_cast<std::size_t>(c2);
  out.kind.assign(ncell, CellSamples::continuum);
  out.data.assign(ncell, {});

  std::vector<Rect> walls;
  for (const Barrier& b : sc.barriers) walls.push_back(barrier_rect(b, h));
  const bool void_inclusion = sc.inclusion_enabled && s.inner_bc != InnerBoundary::transmission;

  // A11, A22, A12, rho at a point of a continuum cell.
  auto sample = [&](const Vec2& p) -> std::array<double, 4> {
    const RegionTag tag = classify(s, p);
    if (tag.kind == RegionKind::inclusion && sc.inclusion_enabled) return {s.mu0, s.mu0, 0.0, s.rho0};
    if (tag.kind == RegionKind::trapezoid && sc.cloak_enabled && !sc.lattice) {
      const MaterialSample m = material_side(s, p, tag.side);
      return {m.C(0, 0), m.C(1, 1), m.C(0, 1), m.rho};
    }
    return {s.mu, s.mu, 0.0, s.rho};
  };

  const double q = 0.25 * h;
  for (int j = 0; j < c2; ++j) {
    for (int i = 0; i < c1; ++i) {
      const std::size_t cell = static_cast<std::size_t>(j) * static_cast<std::size_t>(c1) + static_cast<std::size_t>(i);
      const Vec2 c = grid.node(i, j) + Vec2(0.5 * h, 0.5 * h);
      bool is_void = false;
      for (const Rect& r : walls) is_void = is_void || r.contains(c);
      const RegionTag tag = classify(s, c);
      if (void_inclusion && tag.kind == RegionKind::inclusion) is_void = true;
      if (is_void) {
        out.kind[cell] = CellSamples::void_cell;
        continue;
      }
      if (sc.lattice && tag.kind == RegionKind::trapezoid) {
        out.kind[cell] = CellSamples::lattice_cell;
        continue;
      }
      auto& d = out.data[cell];
      d[6] = sample(c + Vec2(-q, -q))[3];
      d[7] = sample(c + Vec2(q, -q))[3];
      d[8] = sample(c + Vec2(-q, q))[3];
      d[9] = sample(c + Vec2(q, q))[3];
      if (tag.kind == RegionKind::trapezoid && sc.cloak_enabled) {
        out.kind[cell] = CellSamples::cloak_cell;
        const auto tris = cell_triangles(c);
        const Vec2 lo = grid.node(i, j);
        for (int t = 0; t < 2; ++t) {
          Vec2 centroid = Vec2::Zero();
          for (int k : tris[static_cast<std::size_t>(t)]) centroid += lo + h * Vec2(k & 1, k >> 1);
          const auto a = sample(centroid / 3.0);
          d[static_cast<std::size_t>(3 * t)] = a[0];
          d[static_cast<std::size_t>(3 * t + 1)] = a[1];
          d[static_cast<std::size_t>(3 * t + 2)] = a[2];
        }
        continue;
      }
      const auto bottom = sample(c + Vec2(0, -q));
      const auto top = sample(c + Vec2(0, q));
      const auto left = sample(c + Vec2(-q, 0));
      const auto right = sample(c + Vec2(q, 0));
      d[0] = bottom[0];
      d[1] = top[0];
      d[2] = left[1];
      d[3] = right[1];
      d[4] = 0.25 * (bottom[2] + top[2] + left[2] + right[2]);
    }
  }
  return out;
}

LinearSystem assemble(const Scenario& sc, const Grid& grid) { return assemble(sc, grid, sample_cells(sc, grid)); }

LinearSystem assemble(const Scenario& sc, const Grid& grid, const CellSamples& samples) {
  sc.validate();
  check_grid(sc, grid);
  const int n1 = grid.n1();
  const int n2 = grid.n2();
  const std::size_t N = grid.size();
  const double h = grid.h();
  const double w2 = sc.omega * sc.omega;
  const CloakSpec& s = sc.spec;

  // Nine-point stencil storage: slot (di+1) + 3 (dj+1).
  std::vector<Complex> st(N * 9, Complex(0.0, 0.0));
  auto add = [&](int i, int j, int di, int dj, Complex v) {
    st[grid.index(i, j) * 9 + static_cast<std::size_t>((di + 1) + 3 * (dj + 1))] += v;
  };
  auto link = [&](int ia, int ja, int ib, int jb, Complex k) {
    add(ia, ja, 0, 0, -k);
    add(ib, jb, 0, 0, -k);
    add(ia, ja, ib - ia, jb - ja, k);
    add(ib, jb, ia - ib, ja - jb, k);
  };

  const int c1 = n1 - 1;
  const double q = 0.25 * h;
  static constexpr int ci[4] = {0, 1, 0, 1};
  static constexpr int cj[4] = {0, 0, 1, 1};
  static constexpr double d1[4] = {-1, 1, -1, 1};
  static constexpr double d2[4] = {-1, -1, 1, 1};
  for (int j = 0; j < n2 - 1; ++j) {
    for (int i = 0; i < c1; ++i) {
      const std::size_t cell = static_cast<std::size_t>(j) * static_cast<std::size_t>(c1) + static_cast<std::size_t>(i);
      const auto kind = samples.kind[cell];
      if (kind != CellSamples::continuum && kind != CellSamples::cloak_cell) continue;
      const auto& d = samples.data[cell];
      for (int m = 0; m < 4; ++m) {
        const Vec2 p = grid.node(i, j) + Vec2(ci[m] ? 0.75 * h : 0.25 * h, cj[m] ? 0.75 * h : 0.25 * h);
        const auto [s1, s2] = grid.stretch(p, sc.omega);
        add(i + ci[m], j + cj[m], 0, 0, w2 * 0.25 * h * h * d[static_cast<std::size_t>(6 + m)] * s1 * s2);
      }
      if (kind == CellSamples::cloak_cell) {
        // Linear elements on the two triangles; the split follows the
        // diagonal across which the cloak tensor jumps.
        const Vec2 c = grid.node(i, j) + Vec2(0.5 * h, 0.5 * h);
        const auto tris = cell_triangles(c);
        for (int t = 0; t < 2; ++t) {
          const auto& v = tris[static_cast<std::size_t>(t)];
          Mat2 A;
          A << d[static_cast<std::size_t>(3 * t)], d[static_cast<std::size_t>(3 * t + 2)],
              d[static_cast<std::size_t>(3 * t + 2)], d[static_cast<std::size_t>(3 * t + 1)];
          const Eigen::Matrix3d K = triangle_stiffness(A, v, h);
          for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n)
              add(i + ci[v[m]], j + cj[v[m]], ci[v[n]] - ci[v[m]], cj[v[n]] - cj[v[m]], -K(m, n));
        }
        continue;
      }
      const Vec2 c = grid.node(i, j) + Vec2(0.5 * h, 0.5 * h);
      auto stretch = [&](const Vec2& p) { return grid.stretch(p, sc.omega); };
      {
        const auto [s1, s2] = stretch(c + Vec2(0, -q));
        link(i, j, i + 1, j, 0.5 * d[0] * s2 / s1);
      }
      {
        const auto [s1, s2] = stretch(c + Vec2(0, q));
        link(i, j + 1, i + 1, j + 1, 0.5 * d[1] * s2 / s1);
      }
      {
        const auto [s1, s2] = stretch(c + Vec2(-q, 0));
        link(i, j, i, j + 1, 0.5 * d[2] * s1 / s2);
      }
      {
        const auto [s1, s2] = stretch(c + Vec2(q, 0));
        link(i + 1, j, i + 1, j + 1, 0.5 * d[3] * s1 / s2);
      }
      if (d[4] != 0.0) {
        const double cc = 0.25 * d[4];
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n)
            add(i + ci[m], j + cj[m], ci[n] - ci[m], cj[n] - cj[m], -cc * (d1[m] * d2[n] + d2[m] * d1[n]));
      }
    }
  }

  if (sc.lattice) {
    const LatticeGraph& g = *sc.lattice;
    const LatticeEmbedding emb = couple(g, grid);
    auto ij = [&](std::size_t idx) {
      return std::pair<int, int>(static_cast<int>(idx % static_cast<std::size_t>(n1)),
                                 static_cast<int>(idx / static_cast<std::size_t>(n1)));
    };
    for (const LatticeLink& l : g.links) {
      const auto [ia, ja] = ij(emb.grid_index[static_cast<std::size_t>(l.a)]);
      const auto [ib, jb] = ij(emb.grid_index[static_cast<std::size_t>(l.b)]);
      link(ia, ja, ib, jb, l.effective() / l.length);
    }
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
      const auto [i, j] = ij(emb.grid_index[n]);
      add(i, j, 0, 0, w2 * g.nodes[n].mass);
    }
  }

  LinearSystem sys;
  sys.grid = grid;
  sys.omega = sc.omega;
  sys.pinned.assign(N, 0);
  sys.b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N));

  // Dirichlet rows: outer edge, Dirichlet inclusion and walls, isolated nodes.
  std::vector<Rect> dirichlet_walls;
  for (const Barrier& b : sc.barriers)
    if (b.bc == InnerBoundary::dirichlet) dirichlet_walls.push_back(barrier_rect(b, h));
  const bool dirichlet_inclusion = sc.inclusion_enabled && s.inner_bc == InnerBoundary::dirichlet;
  // A plane wave runs parallel to the bottom and top edges; they get the
  // natural zero-flux condition so the incident wave stays x2-independent.
  const bool plane_wave = std::holds_alternative<PlaneWaveSource>(sc.source);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t n = grid.index(i, j);
      bool pin = i == 0 || i == n1 - 1 || (!plane_wave && (j == 0 || j == n2 - 1));
      const Vec2 x = grid.node(i, j);
      if (dirichlet_inclusion && inf_norm(x) <= s.a + 1e-9 * h) pin = true;
      for (const Rect& r : dirichlet_walls) pin = pin || r.contains(x, 1e-9 * h);
      if (!pin) {
        bool any = false;
        for (int k = 0; k < 9; ++k) any = any || st[n * 9 + static_cast<std::size_t>(k)] != Complex(0.0, 0.0);
        pin = !any;
      }
      sys.pinned[n] = pin ? 1 : 0;
    }
  }

  // Forcing, scaled by h^2 like the rows.
  if (const auto* ps = std::get_if<PointSource>(&sc.source)) {
    const double f1 = ps->x0[0] / h - static_cast<double>(grid.origin_index1());
    const double f2 = ps->x0[1] / h - static_cast<double>(grid.origin_index2());
    const int i = static_cast<int>(std::floor(f1));
    const int j = static_cast<int>(std::floor(f2));
    const double t1 = f1 - i;
    const double t2 = f2 - j;
    const double wts[4] = {(1 - t1) * (1 - t2), t1 * (1 - t2), (1 - t1) * t2, t1 * t2};
    for (int m = 0; m < 4; ++m) {
      if (wts[m] == 0.0) continue;
      sys.b[static_cast<Eigen::Index>(grid.index(i + ci[m], j + cj[m]))] -= ps->amplitude * wts[m];
    }
  } else {
    const auto& pw = std::get<PlaneWaveSource>(sc.source);
    const int i = grid.nearest(Vec2(pw.x1_line, 0.0)).first;
    const double k = sc.omega * std::sqrt(s.rho / s.mu);
    // Each node takes the half-cells above and below it, with the stretch
    // sampled where the mass and x1 fluxes sample it.
    for (int j = 0; j < n2; ++j) {
      Complex s2{0.0, 0.0};
      if (j > 0) s2 += 0.5 * grid.stretch(grid.node(i, j) + Vec2(0.0, -0.25 * h), sc.omega).second;
      if (j < n2 - 1) s2 += 0.5 * grid.stretch(grid.node(i, j) + Vec2(0.0, 0.25 * h), sc.omega).second;
      sys.b[static_cast<Eigen::Index>(grid.index(i, j))] += Complex(0.0, 2.0 * k * s.mu * h) * pw.amplitude * s2;
    }
  }

  using RowMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
  RowMatrix R(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  R.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(N), 9));
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t n = grid.index(i, j);
      const auto row = static_cast<Eigen::Index>(n);
      if (sys.pinned[n]) {
        R.insert(row, row) = 1.0;
        sys.b[row] = 0.0;
        continue;
      }
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const Complex v = st[n * 9 + static_cast<std::size_t>((di + 1) + 3 * (dj + 1))];
          if (v == Complex(0.0, 0.0)) continue;
          const std::size_t m = grid.index(i + di, j + dj);
          if (sys.pinned[m]) continue;
          R.insert(row, static_cast<Eigen::Index>(m)) = v;
        }
      }
    }
  }
  st.clear();
  st.shrink_to_fit();
  R.makeCompressed();
  sys.A = R;
  sys.A.makeCompressed();

  sys.meta["omega"] = csv::num(sc.omega);
  sys.meta["h"] = csv::num(h);
  sys.meta["n1"] = std::to_string(n1);
  sys.meta["n2"] = std::to_string(n2);
  sys.meta["unknowns"] = std::to_string(N);
  sys.meta["nonzeros"] = std::to_string(sys.A.nonZeros());
  sys.meta["pml_cells"] = std::to_string(grid.pml().cells);
  sys.meta["pml_sigma_max"] = csv::num(grid.sigma_max());
  sys.meta["points_per_wavelength"] = csv::num(points_per_wavelength(sc, grid));
  return sys;
}

ComplexField::ComplexField(Grid grid, Eigen::VectorXcd values, double omega)
    : grid_(std::move(grid)), values_(std::move(values)), omega_(omega) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size())
    throw DomainError("field: value count does not match the grid");
}

Complex ComplexField::at(const Vec2& x) const {
  const double h = grid_.h();
  const double f1 = x[0] / h - static_cast<double>(grid_.origin_index1());
  const double f2 = x[1] / h - static_cast<double>(grid_.origin_index2());
  const double eps = 1e-9;
  if (f1 < -eps || f2 < -eps || f1 > grid_.n1() - 1 + eps || f2 > grid_.n2() - 1 + eps)
    throw DomainError("field: point outside the grid");
  const int i = std::clamp(static_cast<int>(std::floor(f1)), 0, grid_.n1() - 2);
  const int j = std::clamp(static_cast<int>(std::floor(f2)), 0, grid_.n2() - 2);
  const double t1 = f1 - i;
  const double t2 = f2 - j;
  return (1 - t1) * (1 - t2) * (*this)(i, j) + t1 * (1 - t2) * (*this)(i + 1, j) + (1 - t1) * t2 * (*this)(i, j + 1) +
         t1 * t2 * (*this)(i + 1, j + 1);
}

ComplexField solve(const LinearSystem& sys, const SolveOptions& opts) {
  const auto n = static_cast<Eigen::Index>(sys.grid.size());
  if (sys.A.rows() != n || sys.b.size() != n) throw SolverError("solve: system size does not match its grid");
  const double bnorm = sys.b.norm();
  ComplexField out(sys.grid, Eigen::VectorXcd::Zero(n), sys.omega);
  out.meta = sys.meta;
  if (bnorm == 0.0) {
    out.meta["solver"] = "none (zero forcing)";
    out.meta["residual"] = "0";
    return out;
  }

  Eigen::VectorXcd x;
  std::vector<double> trace;
  std::string solver_name;
  auto residual = [&](const Eigen::VectorXcd& v) { return (sys.b - sys.A * v).norm() / bnorm; };

  if (static_cast<std::size_t>(n) <= opts.direct_limit) {
    Eigen::UmfPackLU<Eigen::SparseMatrix<Complex>> lu;
    lu.compute(sys.A);
    if (lu.info() != Eigen::Success) throw SolverError("solve: sparse LU factorisation failed");
    x = lu.solve(sys.b);
    trace.push_back(residual(x));
    for (int it = 0; it < opts.refinement_steps && trace.back() > 1e-3 * opts.target_residual; ++it) {
      const Eigen::VectorXcd r = sys.b - sys.A * x;
      x += lu.solve(r);
      const double res = residual(x);
      const bool stalled = res >= trace.back();
      trace.push_back(res);
      if (stalled) break;
    }
    solver_name = "umfpack-lu+refinement";
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<Complex>, Eigen::IncompleteLUT<Complex>> it;
    it.preconditioner().setDroptol(1e-4);
    it.preconditioner().setFillfactor(20);
    it.compute(sys.A);
    if (it.info() != Eigen::Success) throw SolverError("solve: ILUT preconditioner failed");
    it.setTolerance(0.5 * opts.target_residual);
    const int chunk = 50;
    it.setMaxIterations(chunk);
    x = Eigen::VectorXcd::Zero(n);
    for (int done = 0; done < opts.iterative_max; done += chunk) {
      x = it.solveWithGuess(sys.b, x);
      trace.push_back(residual(x));
      if (trace.back() < opts.target_residual) break;
    }
    solver_name = "bicgstab+ilut";
  }

  const double final_res = trace.back();
  std::ostringstream tr;
  for (std::size_t i = 0; i < trace.size(); ++i) tr << (i ? ";" : "") << csv::num(trace[i]);
  if (!(final_res < opts.target_residual) || !x.allFinite())
    throw SolverError("solve: residual " + csv::num(final_res) + " above target; trace " + tr.str());
  out = ComplexField(sys.grid, std::move(x), sys.omega);
  out.meta = sys.meta;
  out.residual_trace = std::move(trace);
  out.meta["solver"] = solver_name;
  out.meta["residual"] = csv::num(final_res);
  out.meta["residual_trace"] = tr.str();
  return out;
}

ComplexField run_scenario(const Scenario& sc, const Grid& grid, const SolveOptions& opts) {
  const CellSamples samples = sample_cells(sc, grid);
  ComplexField u = solve(assemble(sc, grid, samples), opts);
  if (!sc.label.empty()) u.meta["scenario"] = sc.label;
  return u;
}

void write_field_csv(std::ostream& out, const ComplexField& u, const Scenario& sc, int stride) {
  if (stride < 1) throw DomainError("field dump: stride must be positive");
  const Grid& g = u.grid();
  out << "x1,x2,re_u,im_u,region\n";
  for (int j = 0; j < g.n2(); j += stride) {
    for (int i = 0; i < g.n1(); i += stride) {
      const Vec2 x = g.node(i, j);
      const Complex v = u(i, j);
      std::string region;
      if (g.in_pml(x)) region = "pml";
      else if (sc.has_structure()) region = to_string(classify(sc.spec, x));
      else region = "ambient";
      csv::write_row(out, {csv::num(x[0]), csv::num(x[1]), csv::num(v.real()), csv::num(v.imag()), region});
    }
  }
}

}  // namespace cloaksim
