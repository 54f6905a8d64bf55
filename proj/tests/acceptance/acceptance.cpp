// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runs sequentially; the continuum criteria dominate the runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cloaksim/analysis.hpp"
#include "cloaksim/cloak_map.hpp"
#include "cloaksim/config.hpp"
#include "cloaksim/csv.hpp"
#include "cloaksim/experiments.hpp"
#include "cloaksim/helmholtz.hpp"
#include "cloaksim/lattice.hpp"
#include "cloaksim/ray_tracer.hpp"

using namespace cloaksim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "" : "!") + what);
  }
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime bound
  std::function<void(Outcome&)> body;
};

Vec2 unit(double ang) { return {std::cos(ang), std::sin(ang)}; }

Vec2 random_frame_point(const CloakSpec& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-s.outer(), s.outer());
  for (;;) {
    const Vec2 x(u(rng), u(rng));
    const double n = std::max(std::abs(x[0]), std::abs(x[1]));
    if (n > s.a && n < s.outer()) return x;
  }
}

double line_offset(const Vec2& p, const Vec2& src, const Vec2& N) {
  const Vec2 d = p - src;
  return std::abs(d[0] * N[1] - d[1] * N[0]);
}

std::pair<Vec2, Vec2> random_ray(const CloakSpec& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> aim(-0.95, 0.95);
  std::uniform_real_distribution<double> dist(2.0, 4.0);
  for (;;) {
    const Vec2 src = dist(rng) * unit(ang(rng));
    const Vec2 N = (s.outer() * Vec2(aim(rng), aim(rng)) - src).normalized();
    if (line_offset(Vec2::Zero(), src, N) > 4.0 * s.eps) return {src, N};
  }
}

const MeasureReport* find_measure(const ResultBundle& b, const std::string& scenario, double omega,
                                  ScatterRegion region) {
  for (const MeasureReport& m : b.measures)
    if (m.scenario == scenario && std::abs(m.omega - omega) < 1e-12 && m.region == region) return &m;
  return nullptr;
}

double solve_seconds(const ResultBundle& b, double omega) {
  double t = 0.0;
  for (const SolveRecord& s : b.solves)
    if (std::abs(s.omega - omega) < 1e-12) t += s.seconds;
  return t;
}

int failed_checks(const ResultBundle& b, const std::string& prefix, std::string* first = nullptr) {
  int n = 0;
  for (const Check& c : b.checks)
    if (c.name.rfind(prefix, 0) == 0 && !c.passed) {
      if (n == 0 && first) *first = c.name + " (" + c.detail + ")";
      ++n;
    }
  return n;
}

int count_checks(const ResultBundle& b, const std::string& prefix) {
  return static_cast<int>(std::count_if(b.checks.begin(), b.checks.end(),
                                        [&](const Check& c) { return c.name.rfind(prefix, 0) == 0; }));
}

// ---------------------------------------------------------------------------

void map_exactness(Outcome& out) {
  double worst_alpha = 0.0;
  for (double eps : {1e-8, 1e-6, 1e-3, 0.1, 0.5}) {
    CloakSpec s;
    s.eps = eps;
    worst_alpha = std::max(worst_alpha, std::abs(s.alpha1() * s.eps + s.alpha2() - s.a));
  }
  out.require(worst_alpha < 1e-12, "alpha identity residual " + fmt(worst_alpha));
  const CloakSpec s;
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Vec2 x = random_frame_point(s, rng);
    worst = std::max(worst, (forward_map(s, inverse_map(s, x)) - x).norm());
  }
  out.require(worst < 1e-12, "round trip max " + fmt(worst) + " over 10000 points");
}

void jacobian_oracle(Outcome& out) {
  const CloakSpec s;
  std::mt19937_64 rng(2);
  const double d = 1e-5;  // relative to |X|, which is as small as eps near the inner face
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec2 x = random_frame_point(s, rng);
    const int side = side_of(x);
    const Vec2 X = inverse_map(s, x);
    Mat2 fd;
    for (int c = 0; c < 2; ++c) {
      Vec2 dX = Vec2::Zero();
      dX[c] = d * X.lpNorm<Eigen::Infinity>();
      fd.col(c) = (forward_map_side(s, X + dX, side) - forward_map_side(s, X - dX, side)) / (2 * dX[c]);
    }
    const Mat2 J = jacobian(s, x).J;
    worst = std::max(worst, (fd - J).norm() / J.norm());
  }
  out.require(worst < 1e-6, "max relative error " + fmt(worst) + " at 1000 points");
}

void ray_suite(Outcome& out) {
  const CloakSpec s;
  std::mt19937_64 rng(3);
  double worst_exit = 0.0;
  int exits = 0;
  for (int k = 0; k < 100; ++k) {
    const auto [src, N] = random_ray(s, rng);
    const RayPath p = trace_exact(s, src, N, 10.0);
    for (const RayEvent& e : p.events) {
      if (e.kind != RayEventKind::exit_cloak) continue;
      ++exits;
      const Vec2 d = e.dir_out.normalized();
      worst_exit = std::max({worst_exit, line_offset(e.x, src, N), std::abs(d[0] * N[1] - d[1] * N[0])});
    }
  }
  out.require(worst_exit < 1e-9 && exits >= 50,
              "exit collinearity " + fmt(worst_exit) + " over " + std::to_string(exits) + " exits");

  double worst_dev = 0.0;
  double worst_h = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto [src, N] = random_ray(s, rng);
    const RayPath p = trace_ode(s, src, N, 8.0, 1e-9);
    for (const RayState& st : p.polyline) {
      worst_dev = std::max(worst_dev, (st.x - exact_position(s, src, N, st.t)).norm());
      const int side = st.region.kind == RegionKind::trapezoid ? st.region.side : 0;
      worst_h = std::max(worst_h, std::abs(hamiltonian(s, st.x, st.s, side)));
    }
  }
  out.require(worst_dev < 1e-6, "ODE vs exact " + fmt(worst_dev));
  out.require(worst_h < 1e-8, "|H| drift " + fmt(worst_h));

  int mismatches = 0;
  const double r = s.outer();
  for (int i = 0; i < 50; ++i) {
    const double M = -2.0 + 4.0 * (i + 0.5) / 50.0;
    for (int j = 0; j < 50; ++j) {
      const double x2 = -r + 2.0 * r * (j + 0.5) / 50.0;
      const bool brute = exit_gradient(s, x2, M) * M < 0.0;
      if (negative_refraction_inequality(s, x2, M) != brute) ++mismatches;
    }
  }
  out.require(mismatches == 0, "predicate mismatches " + std::to_string(mismatches) + "/2500");
}

void solver_oracle(Outcome& out) {
  const ExperimentConfig cfg = default_config(ScenarioKind::cloak_demo);
  const Vec2 src(-3.0, 0.0);
  const double omega = 5.0;
  const double h = experiment_spacing(cfg, omega);
  const double r0 = cfg.cloak.outer();
  Rect need = Rect{-r0, r0, -r0, r0}.united({src[0], src[0], src[1], src[1]});
  for (const Region& r : experiment_regions(cfg, src)) need = need.united(r.bounds());
  const Grid grid = experiment_grid(cfg, h, need);
  out.require(grid.size() <= 2000u * 2000u, "unknowns " + std::to_string(grid.size()) + ", h " + fmt(h));

  Scenario sc;
  sc.spec = cfg.cloak;
  sc.inclusion_enabled = false;
  sc.cloak_enabled = false;
  sc.omega = omega;
  sc.source = PointSource{src};
  const ComplexField u = run_scenario(sc, grid);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Vec2 x = grid.node(i, j);
      if (grid.in_pml(x) || (x - src).norm() <= 3.0 * h) continue;
      const Complex ref = green_free(cfg.cloak.mu, cfg.cloak.rho, omega, x, src);
      num += std::norm(u(i, j) - ref);
      den += std::norm(ref);
    }
  const double l2 = std::sqrt(num / den);
  out.require(l2 < 0.02, "point-source L2 error " + fmt(l2));

  sc.source = PlaneWaveSource{src[0]};
  const ComplexField p = run_scenario(sc, grid);
  double worst = 0.0;
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Vec2 x = grid.node(i, j);
      if (!grid.in_pml(x)) worst = std::max(worst, std::abs(std::abs(p(i, j)) - 1.0));
    }
  out.require(worst < 0.01, "plane-wave amplitude error " + fmt(worst));
}

void cloak_demo_rows(Outcome& out) {
  ExperimentConfig cfg = default_config(ScenarioKind::cloak_demo);
  cfg.sources = {Vec2(-3.0, 0.0)};
  cfg.omegas = {5.0, 10.0};
  cfg.regions = {ScatterRegion::r1};
  const ResultBundle b = run_cloak_demo(cfg);
  const MeasureReport* m5 = find_measure(b, "cloak-demo", 5.0, ScatterRegion::r1);
  const MeasureReport* m10 = find_measure(b, "cloak-demo", 10.0, ScatterRegion::r1);
  out.require(m5 && m10, "both rows measured");
  if (!m5 || !m10) return;
  out.require(m5->E_uncloaked >= 0.11 && m5->E_uncloaked <= 0.20, "omega=5 E_u " + fmt(m5->E_uncloaked));
  out.require(m5->E_cloaked <= 5e-3, "E_c " + fmt(m5->E_cloaked));
  out.require(m5->Q >= 0.97, "Q " + fmt(m5->Q));
  out.require(m10->Q >= 0.96, "omega=10 Q " + fmt(m10->Q));
  const double t5 = solve_seconds(b, 5.0);
  const double t10 = solve_seconds(b, 10.0);
  out.require(t5 < 600.0 && t10 < 600.0, "row times " + fmt(t5, 3) + " s, " + fmt(t10, 3) + " s");
}

void boundary_rows(Outcome& out) {
  const ExperimentConfig cfg = default_config(ScenarioKind::boundary_study);
  const ResultBundle b = run_boundary_study(cfg);
  for (double omega : cfg.omegas)
    for (ScatterRegion r : {ScatterRegion::r1, ScatterRegion::r2}) {
      const MeasureReport* n = find_measure(b, "neumann", omega, r);
      const MeasureReport* d = find_measure(b, "dirichlet", omega, r);
      const std::string row = "omega=" + fmt(omega) + " " + std::string(to_string(r));
      out.require(n && d, row + " measured");
      if (!n || !d) continue;
      out.require(n->Q > d->Q, row + " Q_N " + fmt(n->Q) + " > Q_D " + fmt(d->Q));
      out.require(d->E_cloaked >= 1e-3 && d->E_cloaked <= 1e-1, row + " Dirichlet E_c " + fmt(d->E_cloaked));
    }
}

void frequency_sweep(Outcome& out) {
  ExperimentConfig cfg = default_config(ScenarioKind::freq_sweep);
  cfg.regions = {ScatterRegion::r1};
  cfg.omegas.clear();
  for (int k = 2; k <= 20; ++k) cfg.omegas.push_back(0.5 * k);
  const ResultBundle b = run_freq_sweep(cfg);
  double worst_near = 0.0;
  double worst_ratio = 1e300;
  for (const MeasureReport& m : b.measures) {
    if (m.omega < 1.0 - 1e-12 || m.omega > 10.0 + 1e-12) continue;
    worst_near = std::max(worst_near, m.E_cloaked / m.E_baseline);
    if (m.omega >= 3.0 - 1e-12) worst_ratio = std::min(worst_ratio, m.E_uncloaked / m.E_cloaked);
  }
  out.require(b.measures.size() == cfg.omegas.size(), std::to_string(b.measures.size()) + " frequencies");
  out.require(worst_near <= 10.0, "max E_c/E_b " + fmt(worst_near));
  out.require(worst_ratio >= 10.0, "min E_u/E_c on [3,10] " + fmt(worst_ratio));
}

void lattice_rows(Outcome& out) {
  const ExperimentConfig cfg = default_config(ScenarioKind::lattice_compare);
  const ResultBundle b = run_lattice_compare(cfg);
  int rows = 0;
  for (const MeasureReport& m : b.measures) {
    if (m.scenario != "refined") continue;
    ++rows;
    if (m.source.isApprox(Vec2(-3.0, 0.0)) && std::abs(m.omega - 3.0) < 1e-12 && m.region == ScatterRegion::r1)
      out.require(m.Q >= 0.7, "refined Q at omega=3 R1 " + fmt(m.Q));
  }
  std::string first;
  const int losing = failed_checks(b, "refined_beats_basic", &first);
  out.require(rows == 8 && count_checks(b, "refined_beats_basic") == 8 && losing == 0,
              "refined beats basic " + std::to_string(8 - losing) + "/" + std::to_string(rows) + " rows" +
                  (first.empty() ? "" : ", first loss " + first));
  const Check* worse = b.find_check("basic_can_increase_scattering");
  out.require(worse && worse->passed, "basic E_c > E_u in " + (worse ? worse->detail : std::string("?")));
}

void lattice_consistency(Outcome& out) {
  CloakSpec s;
  const double ell = 0.01;
  const Grid grid = Grid::covering({-1.5, 1.5, -1.5, 1.5}, ell, PmlSpec{}, s.wave_speed());
  Scenario plain;
  plain.spec = s;
  plain.inclusion_enabled = false;
  plain.cloak_enabled = false;
  plain.omega = 3.0;
  plain.source = PointSource{Vec2(-1.25, 0.0)};
  const ComplexField ref = run_scenario(plain, grid);

  Scenario uniform = plain;
  uniform.lattice = build_uniform(s, ell);
  const ComplexField uu = run_scenario(uniform, grid);
  const double e_uniform = (uu.values() - ref.values()).norm() / ref.values().norm();
  out.require(e_uniform < 0.01, "uniform lattice L2 " + fmt(e_uniform));

  CloakSpec id = s;
  id.eps = id.a;
  Scenario identity = plain;
  identity.spec = id;
  identity.lattice = build_refined(id, ell);
  const ComplexField ui = run_scenario(identity, grid);
  const double e_identity = (ui.values() - ref.values()).norm() / ref.values().norm();
  out.require(e_identity < 0.01, "eps=a refined lattice L2 " + fmt(e_identity));
}

void double_slit(Outcome& out) {
  const ExperimentConfig cfg = default_config(ScenarioKind::double_slit);
  const double wavelength = 2.0 * kPi * cfg.cloak.wave_speed() / cfg.omegas.at(0);
  out.require(std::abs(cfg.slit.separation / wavelength - 3.0) < 0.05,
              "slit spacing " + fmt(cfg.slit.separation / wavelength) + " wavelengths");
  const ResultBundle b = run_double_slit(cfg);
  const std::string w = "[omega=" + csv::num(cfg.omegas.at(0)) + "]";
  const auto cc = b.values.find("corr_cloaked" + w);
  const auto cu = b.values.find("corr_uncloaked" + w);
  out.require(cc != b.values.end() && cu != b.values.end(), "correlations reported");
  if (cc == b.values.end() || cu == b.values.end()) return;
  out.require(cc->second >= 0.95, "corr cloaked " + fmt(cc->second, 5));
  out.require(cc->second > cu->second, "corr uncloaked " + fmt(cu->second, 5));
}

// Reference (uncloaked E, cloaked E, Q) rows: 1 transmission, 2 inner boundary,
// 3 basic lattice, 4 refined lattice.
struct ReferenceRow {
  int group;
  int row;
  double E_u;
  double E_c;
  double Q;
};

const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows = {
      {1, 0, 0.1529, 4.351e-4, 0.9972}, {1, 1, 0.1455, 4.514e-4, 0.9969}, {1, 2, 0.2002, 3.941e-4, 0.9980},
      {1, 3, 0.3286, 4.068e-4, 0.9988}, {1, 4, 0.3224, 3.664e-4, 0.9989}, {1, 5, 0.3093, 1.167e-3, 0.9962},
      {1, 6, 0.2988, 3.654e-4, 0.9988}, {1, 7, 0.2988, 7.803e-4, 0.9974},
      {2, 0, 0.1624, 4.351e-4, 0.9973}, {2, 1, 0.1558, 4.540e-4, 0.9971}, {2, 2, 0.2931, 1.038e-2, 0.9646},
      {2, 3, 0.2553, 7.875e-3, 0.9692}, {2, 4, 0.3436, 3.664e-4, 0.9989}, {2, 5, 0.3258, 1.163e-3, 0.9964},
      {2, 6, 0.4864, 1.566e-2, 0.9678}, {2, 7, 0.5030, 1.673e-2, 0.9667},
      {3, 0, 0.1430, 0.1662, 0.1617},   {3, 1, 0.1113, 0.1816, 0.6327},   {3, 2, 0.1529, 0.2495, 0.6318},
      {3, 3, 0.2002, 0.3538, 0.7676},   {3, 4, 0.2341, 0.3362, 0.4363},   {3, 5, 0.3224, 0.4671, 0.4489},
      {3, 6, 0.1578, 0.3455, 1.189},    {3, 7, 0.2988, 0.6011, 1.012},
      {4, 0, 0.1430, 0.01191, 0.8929},  {4, 1, 0.1113, 3.385e-3, 0.9763}, {4, 2, 0.1529, 0.04324, 0.7173},
      {4, 3, 0.2002, 0.03125, 0.8438},  {4, 4, 0.2341, 0.01150, 0.9508},  {4, 5, 0.3224, 0.0172, 0.9508},
      {4, 6, 0.1578, 5.047e-3, 0.9680}, {4, 7, 0.2988, 0.02114, 0.9292},
  };
  return rows;
}

// Half a unit in the last digit of a value with `sig` significant digits.
double half_ulp(double v, int sig) { return 0.5 * std::pow(10.0, std::floor(std::log10(std::abs(v))) - sig + 1); }

int significant_digits(const ReferenceRow& r, double v) {
  // Values carry four significant digits except 0.0172 (three).
  return (r.group == 4 && r.row == 5 && v == 0.0172) ? 3 : 4;
}

// Q range reachable from the reference E values within their rounding.
std::pair<double, double> q_interval(const ReferenceRow& r) {
  const double du = half_ulp(r.E_u, significant_digits(r, r.E_u));
  const double dc = half_ulp(r.E_c, significant_digits(r, r.E_c));
  double lo = 1e300, hi = -1e300;
  for (double u : {r.E_u - du, r.E_u + du})
    for (double c : {r.E_c - dc, r.E_c + dc}) {
      const double q = quality_factor(u, c);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  // Q is monotone in each argument on either side of E_u = E_c, so the
  // corners bound it.
  return {lo, hi};
}

// Strict: every reference Q within 5e-4 of quality_factor on the reference E.
// Misses are classified in the notes: reachable within the rounding of the
// reference E values, or matched by the uncloaked E of another row of the
// same group (a transposed entry), or neither.
void q_regression(Outcome& out) {
  const double tol = 5e-4;
  int direct = 0;
  for (const ReferenceRow& r : reference_rows()) {
    const double q = quality_factor(r.E_u, r.E_c);
    if (std::abs(q - r.Q) <= tol) {
      ++direct;
      continue;
    }
    std::string why = "inconsistent with the reference E";
    const auto [lo, hi] = q_interval(r);
    if (r.Q >= lo - tol && r.Q <= hi + tol) {
      why = "reachable within input rounding [" + fmt(lo) + ", " + fmt(hi) + "]";
    } else {
      for (const ReferenceRow& o : reference_rows())
        if (o.group == r.group && o.row != r.row && std::abs(quality_factor(o.E_u, r.E_c) - r.Q) <= tol)
          why = "matches E_u of row " + std::to_string(o.row);
    }
    out.require(false, "group " + std::to_string(r.group) + " row " + std::to_string(r.row) + ": Q " + fmt(q) +
                           " vs reference " + fmt(r.Q) + " (" + why + ")");
  }
  out.notes.insert(out.notes.begin(), std::to_string(direct) + "/" + std::to_string(reference_rows().size()) +
                                          " reference Q reproduced within 5e-4");
}

}  // namespace

// With arguments, runs only the listed criterion numbers.
int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "map exactness", 1.0, map_exactness},
      {2, "jacobian oracle", 1.0, jacobian_oracle},
      {3, "ray suite", 30.0, ray_suite},
      {4, "solver oracle", 120.0, solver_oracle},
      {5, "cloak demo", 0.0, cloak_demo_rows},
      {6, "boundary ordering", 0.0, boundary_rows},
      {7, "frequency sweep", 0.0, frequency_sweep},
      {8, "lattice compare", 900.0, lattice_rows},
      {9, "lattice consistency", 0.0, lattice_consistency},
      {10, "double slit", 300.0, double_slit},
      {11, "Q arithmetic", 0.0, q_regression},
  };
  std::vector<int> only;
  for (int k = 1; k < argc; ++k) only.push_back(std::atoi(argv[k]));
  int failures = 0;
  int ran = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    Outcome out;
    const auto t0 = Clock::now();
    try {
      c.body(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double t = seconds_since(t0);
    if (c.budget_s > 0.0) out.require(t < c.budget_s, "budget " + fmt(c.budget_s, 4) + " s");
    if (!out.pass) ++failures;
    std::string detail;
    for (const std::string& n : out.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::printf("%s  %2d %-20s %8.2f s  %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, t, detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matches the arguments\n");
    return 1;
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
