#include "cloaksim/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "cloaksim/csv.hpp"
#include "cloaksim/helmholtz.hpp"
#include "cloaksim/lattice.hpp"
#include "cloaksim/ray_tracer.hpp"

namespace cloaksim {

namespace {

std::string src_name(const Vec2& x) { return csv::num(x[0]) + "_" + csv::num(x[1]); }

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, const std::string& out) : cfg_(cfg) {
    cfg.validate();
    bundle_.scenario = cfg.scenario;
    bundle_.out_dir = out;
    if (!out.empty()) std::filesystem::create_directories(out);
  }

  const ExperimentConfig& cfg() const { return cfg_; }
  ResultBundle& bundle() { return bundle_; }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    if (bundle_.out_dir.empty()) return;
    const std::filesystem::path path = std::filesystem::path(bundle_.out_dir) / name;
    std::ofstream f(path);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    body(f);
    if (!f) throw Error("failed writing '" + path.string() + "'");
    if (std::find(bundle_.files.begin(), bundle_.files.end(), name) == bundle_.files.end())
      bundle_.files.push_back(name);
  }

  ComplexField solve(const Scenario& sc, const Grid& grid) {
    const auto t0 = std::chrono::steady_clock::now();
    ComplexField u;
    try {
      u = run_scenario(sc, grid);
    } catch (const Error& e) {
      throw SolverError("run '" + sc.label + "' (omega " + csv::num(sc.omega) + ", h " + csv::num(grid.h()) +
                        "): " + e.what());
    }
    SolveRecord r;
    r.label = sc.label;
    r.omega = sc.omega;
    r.h = grid.h();
    r.n1 = grid.n1();
    r.n2 = grid.n2();
    r.solver = u.meta.count("solver") ? u.meta.at("solver") : "";
    r.residual = u.meta.count("residual") ? u.meta.at("residual") : "";
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bundle_.solves.push_back(r);
    if (cfg_.field_stride > 0) {
      std::string name = "field_" + sc.label + ".csv";
      std::replace(name.begin(), name.end(), '/', '_');
      write(name, [&](std::ostream& o) { write_field_csv(o, u, sc, cfg_.field_stride); });
    }
    return u;
  }

  void check(const std::string& name, bool passed, const std::string& detail) {
    bundle_.checks.push_back({name, passed, detail});
  }

  ResultBundle finish() {
    write("config.txt", [&](std::ostream& o) { write_config(o, cfg_); });
    write("checks.csv", [&](std::ostream& o) {
      csv::write_row(o, {"check", "passed", "detail"});
      for (const Check& c : bundle_.checks) csv::write_row(o, {c.name, c.passed ? "true" : "false", c.detail});
    });
    write("run.log", [&](std::ostream& o) {
      o << "[config]\n";
      write_config(o, cfg_);
      o << "[solves]\n";
      for (const SolveRecord& r : bundle_.solves) {
        o << "label=" << r.label << " omega=" << csv::num(r.omega) << " h=" << csv::num(r.h) << " n1=" << r.n1
          << " n2=" << r.n2 << " unknowns=" << static_cast<long long>(r.n1) * r.n2
          << " pml_cells=" << cfg_.grid.pml.cells << " pml_reflection=" << csv::num(cfg_.grid.pml.reflection)
          << " pml_power=" << csv::num(cfg_.grid.pml.power) << " solver=" << r.solver << " residual=" << r.residual
          << " seconds=" << csv::num(r.seconds) << '\n';
      }
      o << "[values]\n";
      for (const auto& [k, v] : bundle_.values) o << k << '=' << csv::num(v) << '\n';
      o << "[checks]\n";
      for (const Check& c : bundle_.checks) o << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    });
    return bundle_;
  }

 private:
  ExperimentConfig cfg_;
  ResultBundle bundle_;
};

Rect square(double r) { return {-r, r, -r, r}; }

Rect point_rect(const Vec2& x) { return {x[0], x[0], x[1], x[1]}; }

Scenario point_scenario(const ExperimentConfig& cfg, const Vec2& src, double omega, bool inclusion, bool cloak,
                        const std::string& label) {
  Scenario sc;
  sc.spec = cfg.cloak;
  sc.inclusion_enabled = inclusion;
  sc.cloak_enabled = cloak;
  sc.source = PointSource{src};
  sc.omega = omega;
  sc.label = label;
  return sc;
}

Rect point_need(const ExperimentConfig& cfg, const Vec2& src, const std::vector<Region>& regions) {
  Rect need = square(cfg.cloak.outer()).united(point_rect(src));
  for (const Region& r : regions) need = need.united(r.bounds());
  return need;
}

// E of u, measured against the free-space Green's function of the source.
double measure(const ExperimentConfig& cfg, const ComplexField& u, const Vec2& src, double omega, const Region& r) {
  const double mu = cfg.cloak.mu;
  const double rho = cfg.cloak.rho;
  return scattering_measure(u, [&](const Vec2& x) { return green_free(mu, rho, omega, x, src); }, r);
}

std::string row_name(const std::string& what, const Vec2& src, double omega, const Region& r) {
  return what + "[src=" + src_name(src) + ",omega=" + csv::num(omega) + "," + std::string(to_string(r.kind)) + "]";
}

void write_measures(Runner& run) {
  run.write("measures.csv", [&](std::ostream& o) {
    write_measure_header(o);
    for (const MeasureReport& m : run.bundle().measures) write_measure_row(o, m);
  });
}

struct Triplet {
  double base = 0.0;
  double unc = 0.0;
  double clk = 0.0;
};

}  // namespace

bool ResultBundle::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* ResultBundle::find_check(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double auto_spacing(const CloakSpec& spec, double omega, double ppw) {
  spec.validate();
  if (!(omega > 0.0 && ppw > 0.0)) throw DomainError("auto_spacing: omega and ppw must be positive");
  const double target = std::min(2.0 * kPi * spec.wave_speed() / (omega * ppw), spec.a / 20.0);
  const long first = static_cast<long>(std::ceil(spec.a / target - 1e-9));
  for (long n = first; n < first + 100000; ++n) {
    const double h = spec.a / static_cast<double>(n);
    const double m = spec.w / h;
    if (std::round(m) >= 1.0 && std::abs(m - std::round(m)) <= 1e-9 * m) return h;
  }
  throw GeometryError("auto_spacing: no spacing a/N resolves both a and w; set grid.h");
}

double experiment_spacing(const ExperimentConfig& cfg, double omega) {
  return cfg.grid.h > 0.0 ? cfg.grid.h : auto_spacing(cfg.cloak, omega, cfg.grid.ppw);
}

Grid experiment_grid(const ExperimentConfig& cfg, double h, const Rect& need) {
  const Rect interior = need.expanded(cfg.grid.margin).united(square(cfg.cloak.outer() + 11.0 * h));
  return Grid::covering(interior, h, cfg.grid.pml, cfg.cloak.wave_speed());
}

std::vector<Region> experiment_regions(const ExperimentConfig& cfg, const Vec2& source) {
  std::vector<ScatterRegion> kinds = cfg.regions;
  if (kinds.empty()) {
    const bool diagonal = std::abs(std::abs(source[0]) - std::abs(source[1])) <= 1e-9 * source.norm();
    kinds = {ScatterRegion::r1, diagonal ? ScatterRegion::r3 : ScatterRegion::r2};
  }
  std::vector<Region> out;
  for (ScatterRegion k : kinds) {
    if (k == ScatterRegion::custom) {
      Region r;
      r.kind = k;
      r.polygon = cfg.region_polygon;
      out.push_back(r);
    } else {
      out.push_back(make_region(k, cfg.cloak, source));
    }
  }
  return out;
}

ResultBundle run_cloak_demo(const ExperimentConfig& cfg, const std::string& out_dir) {
  Runner run(cfg, out_dir);
  for (const Vec2& src : cfg.sources) {
    const std::vector<Region> regions = experiment_regions(cfg, src);
    for (double omega : cfg.omegas) {
      const Grid grid = experiment_grid(cfg, experiment_spacing(cfg, omega), point_need(cfg, src, regions));
      for (const Region& r : regions) check_region(r, cfg.cloak, grid);
      const std::string tag = "src" + src_name(src) + "/omega" + csv::num(omega);
      const ComplexField ub = run.solve(point_scenario(cfg, src, omega, false, false, tag + "/baseline"), grid);
      const ComplexField uu = run.solve(point_scenario(cfg, src, omega, true, false, tag + "/uncloaked"), grid);
      const ComplexField uc = run.solve(point_scenario(cfg, src, omega, true, true, tag + "/cloaked"), grid);
      for (const Region& r : regions) {
        MeasureReport m;
        m.scenario = "cloak-demo";
        m.omega = omega;
        m.source = src;
        m.region = r.kind;
        m.E_baseline = measure(cfg, ub, src, omega, r);
        m.E_uncloaked = measure(cfg, uu, src, omega, r);
        m.E_cloaked = measure(cfg, uc, src, omega, r);
        m.Q = quality_factor(m.E_uncloaked, m.E_cloaked);
        run.bundle().measures.push_back(m);
        run.check(row_name("baseline_floor", src, omega, r), m.E_baseline < cfg.floor,
                  "E_baseline=" + csv::num(m.E_baseline) + " floor=" + csv::num(cfg.floor));
        run.check(row_name("cloak_reduces", src, omega, r), m.E_cloaked < m.E_uncloaked,
                  "E_cloaked=" + csv::num(m.E_cloaked) + " E_uncloaked=" + csv::num(m.E_uncloaked));
      }
    }
  }
  write_measures(run);
  return run.finish();
}

ResultBundle run_boundary_study(const ExperimentConfig& cfg, const std::string& out_dir) {
  Runner run(cfg, out_dir);
  for (const Vec2& src : cfg.sources) {
    const std::vector<Region> regions = experiment_regions(cfg, src);
    for (double omega : cfg.omegas) {
      const Grid grid = experiment_grid(cfg, experiment_spacing(cfg, omega), point_need(cfg, src, regions));
      for (const Region& r : regions) check_region(r, cfg.cloak, grid);
      const std::string tag = "src" + src_name(src) + "/omega" + csv::num(omega);
      const ComplexField ub = run.solve(point_scenario(cfg, src, omega, false, false, tag + "/baseline"), grid);
      std::vector<MeasureReport> rows[2];
      int k = 0;
      for (InnerBoundary bc : {InnerBoundary::neumann, InnerBoundary::dirichlet}) {
        ExperimentConfig c = cfg;
        c.cloak.inner_bc = bc;
        const std::string bname(to_string(bc));
        const ComplexField uu = run.solve(point_scenario(c, src, omega, true, false, tag + "/" + bname + "/uncloaked"), grid);
        const ComplexField uc = run.solve(point_scenario(c, src, omega, true, true, tag + "/" + bname + "/cloaked"), grid);
        for (const Region& r : regions) {
          MeasureReport m;
          m.scenario = bname;
          m.omega = omega;
          m.source = src;
          m.region = r.kind;
          m.E_baseline = measure(cfg, ub, src, omega, r);
          m.E_uncloaked = measure(cfg, uu, src, omega, r);
          m.E_cloaked = measure(cfg, uc, src, omega, r);
          m.Q = quality_factor(m.E_uncloaked, m.E_cloaked);
          run.bundle().measures.push_back(m);
          rows[k].push_back(m);
        }
        ++k;
      }
      for (std::size_t i = 0; i < regions.size(); ++i) {
        const MeasureReport& n = rows[0][i];
        const MeasureReport& d = rows[1][i];
        run.check(row_name("neumann_below_dirichlet", src, omega, regions[i]), n.E_cloaked < d.E_cloaked,
                  "E_neumann=" + csv::num(n.E_cloaked) + " E_dirichlet=" + csv::num(d.E_cloaked));
        run.check(row_name("quality_order", src, omega, regions[i]), n.Q > d.Q,
                  "Q_neumann=" + csv::num(n.Q) + " Q_dirichlet=" + csv::num(d.Q));
      }
    }
  }
  write_measures(run);
  return run.finish();
}

ResultBundle run_freq_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  Runner run(cfg, out_dir);
  struct Row {
    double omega;
    double h;
    MeasureReport m;
  };
  std::vector<Row> rows;
  for (const Vec2& src : cfg.sources) {
    const std::vector<Region> regions = experiment_regions(cfg, src);
    for (double omega : cfg.omegas) {
      const double h = experiment_spacing(cfg, omega);
      const Grid grid = experiment_grid(cfg, h, point_need(cfg, src, regions));
      for (const Region& r : regions) check_region(r, cfg.cloak, grid);
      const std::string tag = "src" + src_name(src) + "/omega" + csv::num(omega);
      const ComplexField ub = run.solve(point_scenario(cfg, src, omega, false, false, tag + "/baseline"), grid);
      const ComplexField uu = run.solve(point_scenario(cfg, src, omega, true, false, tag + "/uncloaked"), grid);
      const ComplexField uc = run.solve(point_scenario(cfg, src, omega, true, true, tag + "/cloaked"), grid);
      for (const Region& r : regions) {
        MeasureReport m;
        m.scenario = "freq-sweep";
        m.omega = omega;
        m.source = src;
        m.region = r.kind;
        m.E_baseline = measure(cfg, ub, src, omega, r);
        m.E_uncloaked = measure(cfg, uu, src, omega, r);
        m.E_cloaked = measure(cfg, uc, src, omega, r);
        m.Q = quality_factor(m.E_uncloaked, m.E_cloaked);
        run.bundle().measures.push_back(m);
        rows.push_back({omega, h, m});
        if (omega >= 1.0 && omega <= 10.0)
          run.check(row_name("cloaked_near_baseline", src, omega, r), m.E_cloaked <= 10.0 * m.E_baseline,
                    "E_cloaked=" + csv::num(m.E_cloaked) + " E_baseline=" + csv::num(m.E_baseline));
        if (omega >= 3.0 && omega <= 10.0)
          run.check(row_name("uncloaked_ratio", src, omega, r), m.E_uncloaked >= 10.0 * m.E_cloaked,
                    "ratio=" + csv::num(m.E_uncloaked / m.E_cloaked));
        if (omega < 1.0)
          run.check(row_name("long_wave_order", src, omega, r),
                    m.E_baseline <= m.E_cloaked && m.E_cloaked <= m.E_uncloaked,
                    "E_baseline=" + csv::num(m.E_baseline) + " E_cloaked=" + csv::num(m.E_cloaked) +
                        " E_uncloaked=" + csv::num(m.E_uncloaked));
      }
    }
  }
  run.write("sweep.csv", [&](std::ostream& o) {
    csv::write_row(o, {"omega", "source_x1", "source_x2", "region", "h", "E_baseline", "E_uncloaked", "E_cloaked"});
    for (const Row& r : rows)
      csv::write_row(o, {csv::num(r.omega), csv::num(r.m.source[0]), csv::num(r.m.source[1]),
                         std::string(to_string(r.m.region)), csv::num(r.h), csv::num(r.m.E_baseline),
                         csv::num(r.m.E_uncloaked), csv::num(r.m.E_cloaked)});
  });
  write_measures(run);
  return run.finish();
}

ResultBundle run_double_slit(const ExperimentConfig& cfg, const std::string& out_dir) {
  Runner run(cfg, out_dir);
  const SlitConfig& sl = cfg.slit;
  const double r = cfg.cloak.outer();
  if (!(sl.barrier_x1 < -r)) throw ConfigError("slit.barrier_x1 must lie in front of the cloak (< -(a+w))");
  if (!(sl.source_x1 < sl.barrier_x1 && sl.source_x1 < -r)) throw ConfigError("slit.source_x1 must precede the barrier");
  const double screen = sl.barrier_x1 + sl.screen_distance;
  if (!(screen > r)) throw ConfigError("the screen must lie behind the cloak");
  const double yc = 0.5 * sl.separation;
  for (double omega : cfg.omegas) {
    const double h = experiment_spacing(cfg, omega);
    const Rect need{sl.source_x1, screen, yc - sl.screen_half_span, yc + sl.screen_half_span};
    const Grid grid = experiment_grid(cfg, h, need);
    const Rect ext = grid.extent();
    const double lo = ext.x2_lo - 1.0;
    const double hi = ext.x2_hi + 1.0;
    const double half = 0.5 * sl.aperture;
    Scenario base;
    base.spec = cfg.cloak;
    base.source = PlaneWaveSource{sl.source_x1, 1.0};
    base.omega = omega;
    for (auto [p, q] : {std::pair<double, double>{lo, -half}, {half, sl.separation - half}, {sl.separation + half, hi}}) {
      Barrier b;
      b.p0 = Vec2(sl.barrier_x1, p);
      b.p1 = Vec2(sl.barrier_x1, q);
      b.thickness_cells = sl.thickness_cells;
      base.barriers.push_back(b);
    }
    const std::string tag = "omega" + csv::num(omega);
    std::vector<std::vector<ProfilePoint>> prof;
    const char* names[3] = {"intact", "uncloaked", "cloaked"};
    for (int mode = 0; mode < 3; ++mode) {
      Scenario sc = base;
      sc.inclusion_enabled = mode != 0;
      sc.cloak_enabled = mode == 2;
      sc.label = tag + "/" + names[mode];
      const ComplexField u = run.solve(sc, grid);
      prof.push_back(fringe_profile(u, Vec2(screen, yc - sl.screen_half_span), Vec2(screen, yc + sl.screen_half_span),
                                    sl.samples));
    }
    const double c_unc = profile_correlation(prof[0], prof[1]);
    const double c_clk = profile_correlation(prof[0], prof[2]);
    const int maxima = count_local_maxima(prof[0]);
    const std::string w = csv::num(omega);
    run.bundle().values["corr_uncloaked[omega=" + w + "]"] = c_unc;
    run.bundle().values["corr_cloaked[omega=" + w + "]"] = c_clk;
    run.bundle().values["maxima_intact[omega=" + w + "]"] = maxima;
    run.check("cloaked_restores[omega=" + w + "]", c_clk >= 0.95, "corr=" + csv::num(c_clk));
    run.check("cloaked_beats_uncloaked[omega=" + w + "]", c_clk > c_unc,
              "corr_cloaked=" + csv::num(c_clk) + " corr_uncloaked=" + csv::num(c_unc));
    run.check("visible_fringes[omega=" + w + "]", maxima >= 5, "maxima=" + std::to_string(maxima));
    run.write("fringes_omega" + w + ".csv", [&](std::ostream& o) {
      csv::write_row(o, {"position", "x1", "x2", "intact", "uncloaked", "cloaked"});
      for (std::size_t k = 0; k < prof[0].size(); ++k) {
        const double s = prof[0][k].position;
        csv::write_row(o, {csv::num(s), csv::num(screen), csv::num(yc - sl.screen_half_span + s),
                           csv::num(prof[0][k].magnitude), csv::num(prof[1][k].magnitude),
                           csv::num(prof[2][k].magnitude)});
      }
    });
  }
  run.write("correlations.csv", [&](std::ostream& o) {
    csv::write_row(o, {"quantity", "value"});
    for (const auto& [k, v] : run.bundle().values) csv::write_row(o, {k, csv::num(v)});
  });
  return run.finish();
}

ResultBundle run_lattice_compare(const ExperimentConfig& cfg, const std::string& out_dir) {
  Runner run(cfg, out_dir);
  const double ell = cfg.lattice_ell;
  const LatticeGraph basic = build_basic(cfg.cloak, ell);
  const LatticeGraph refined = build_refined(cfg.cloak, ell);
  bool basic_worse = false;
  std::string worse_rows;
  for (const Vec2& src : cfg.sources) {
    const std::vector<Region> regions = experiment_regions(cfg, src);
    for (double omega : cfg.omegas) {
      const Grid grid = experiment_grid(cfg, ell, point_need(cfg, src, regions));
      for (const Region& r : regions) check_region(r, cfg.cloak, grid);
      const std::string tag = "src" + src_name(src) + "/omega" + csv::num(omega);
      const ComplexField ub = run.solve(point_scenario(cfg, src, omega, false, false, tag + "/baseline"), grid);
      const ComplexField uu = run.solve(point_scenario(cfg, src, omega, true, false, tag + "/uncloaked"), grid);
      Scenario sb = point_scenario(cfg, src, omega, true, true, tag + "/basic");
      sb.lattice = basic;
      const ComplexField u_basic = run.solve(sb, grid);
      Scenario sr = point_scenario(cfg, src, omega, true, true, tag + "/refined");
      sr.lattice = refined;
      const ComplexField u_refined = run.solve(sr, grid);
      for (const Region& r : regions) {
        MeasureReport m;
        m.omega = omega;
        m.source = src;
        m.region = r.kind;
        m.E_baseline = measure(cfg, ub, src, omega, r);
        m.E_uncloaked = measure(cfg, uu, src, omega, r);
        MeasureReport mb = m;
        mb.scenario = "basic";
        mb.E_cloaked = measure(cfg, u_basic, src, omega, r);
        mb.Q = quality_factor(mb.E_uncloaked, mb.E_cloaked);
        MeasureReport mr = m;
        mr.scenario = "refined";
        mr.E_cloaked = measure(cfg, u_refined, src, omega, r);
        mr.Q = quality_factor(mr.E_uncloaked, mr.E_cloaked);
        run.bundle().measures.push_back(mb);
        run.bundle().measures.push_back(mr);
        run.check(row_name("refined_beats_basic", src, omega, r), mr.E_cloaked < mb.E_cloaked,
                  "E_refined=" + csv::num(mr.E_cloaked) + " E_basic=" + csv::num(mb.E_cloaked));
        run.check(row_name("refined_reduces", src, omega, r), mr.E_cloaked < mr.E_uncloaked,
                  "E_refined=" + csv::num(mr.E_cloaked) + " E_uncloaked=" + csv::num(mr.E_uncloaked));
        if (mb.E_cloaked > mb.E_uncloaked) {
          basic_worse = true;
          worse_rows += (worse_rows.empty() ? "" : " ") + row_name("", src, omega, r);
        }
      }
    }
  }
  run.check("basic_can_increase_scattering", basic_worse, worse_rows.empty() ? "no row" : worse_rows);
  run.write("lattice_basic_nodes.csv", [&](std::ostream& o) { write_lattice_nodes_csv(o, basic); });
  run.write("lattice_basic_links.csv", [&](std::ostream& o) { write_lattice_links_csv(o, basic); });
  run.write("lattice_refined_nodes.csv", [&](std::ostream& o) { write_lattice_nodes_csv(o, refined); });
  run.write("lattice_refined_links.csv", [&](std::ostream& o) { write_lattice_links_csv(o, refined); });
  run.write("principal_lattice.csv", [&](std::ostream& o) {
    const double a = cfg.cloak.a;
    write_principal_csv(o, principal_lattice(cfg.cloak, default_principal_seeds(cfg.cloak, 8), 0.01 * a, 2000));
  });
  write_measures(run);
  return run.finish();
}

ResultBundle run_ray_diagram(const ExperimentConfig& cfg, const std::string& out_dir) {
  Runner run(cfg, out_dir);
  const CloakSpec& s = cfg.cloak;
  std::ostringstream rays;
  std::ostringstream events;
  csv::write_row(rays, {"ray", "source_x1", "source_x2", "t", "x1", "x2", "s1", "s2", "region"});
  csv::write_row(events, {"ray", "kind", "t", "x1", "x2", "from", "to", "grad_in", "grad_out", "negative"});
  int ray_id = 0;
  for (const Vec2& src : cfg.sources) {
    const double dist = src.norm();
    if (!(dist > s.outer() * std::sqrt(2.0))) throw GeometryError("ray-diagram: source must lie outside the cloak's circumcircle");
    const Vec2 axis = -src / dist;
    double spread = cfg.rays.spread;
    if (spread == 0.0) {
      // Just wide enough to cover the outer square.
      for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0}) {
          const Vec2 d = Vec2(sx, sy) * s.outer() - src;
          spread = std::max(spread, std::acos(std::clamp(d.normalized().dot(axis), -1.0, 1.0)));
        }
    }
    int entered_inclusion = 0;
    int skipped = 0;
    int exits = 0;
    int negative_exits = 0;
    int inconsistent = 0;
    std::array<int, 4> face_negative{};
    double worst_offset = 0.0;
    for (int k = 0; k < cfg.rays.count; ++k) {
      const double th = cfg.rays.count == 1 ? 0.0 : -spread + 2.0 * spread * k / (cfg.rays.count - 1);
      const Vec2 N(std::cos(th) * axis[0] - std::sin(th) * axis[1], std::sin(th) * axis[0] + std::cos(th) * axis[1]);
      RayPath path;
      try {
        path = cfg.rays.ode ? trace_ode(s, src, N, cfg.rays.t_max, cfg.rays.tol) : trace_exact(s, src, N, cfg.rays.t_max);
      } catch (const DomainError&) {
        ++skipped;  // the undeformed line meets the pre-image square
        continue;
      }
      for (const RayState& st : path.polyline) {
        if (classify(s, st.x).kind == RegionKind::inclusion) ++entered_inclusion;
        csv::write_row(rays, {std::to_string(ray_id), csv::num(src[0]), csv::num(src[1]), csv::num(st.t),
                              csv::num(st.x[0]), csv::num(st.x[1]), csv::num(st.s[0]), csv::num(st.s[1]),
                              to_string(st.region)});
      }
      for (const RayEvent& e : path.events) {
        csv::write_row(events, {std::to_string(ray_id), std::string(to_string(e.kind)), csv::num(e.t),
                                csv::num(e.x[0]), csv::num(e.x[1]), to_string(e.from), to_string(e.to),
                                csv::num(e.grad_in), csv::num(e.grad_out), e.negative_refraction() ? "true" : "false"});
        if (e.kind != RayEventKind::exit_cloak) continue;
        ++exits;
        // Exit point and direction continue the incident straight line.
        const Vec2 d = e.x - src;
        worst_offset = std::max(worst_offset, std::abs(d[0] * N[1] - d[1] * N[0]));
        const Vec2 out = e.dir_out.normalized();
        worst_offset = std::max(worst_offset, std::abs(out[0] * N[1] - out[1] * N[0]));
        const int face = side_of(e.x);
        if (e.negative_refraction()) {
          ++negative_exits;
          ++face_negative[static_cast<std::size_t>(face - 1)];
        }
        const Vec2 l = face == 1 ? e.x : face == 2 ? Vec2(e.x[1], -e.x[0]) : face == 3 ? Vec2(-e.x[0], -e.x[1]) : Vec2(-e.x[1], e.x[0]);
        const Vec2 Nl = face == 1 ? N : face == 2 ? Vec2(N[1], -N[0]) : face == 3 ? Vec2(-N[0], -N[1]) : Vec2(-N[1], N[0]);
        if (std::abs(Nl[0]) > 1e-12 && negative_refraction_inequality(s, l[1], Nl[1] / Nl[0]) != e.negative_refraction())
          ++inconsistent;
      }
      ++ray_id;
    }
    const std::string sn = "[src=" + src_name(src) + "]";
    run.bundle().values["exit_events" + sn] = exits;
    run.bundle().values["negative_exits" + sn] = negative_exits;
    run.bundle().values["skipped_rays" + sn] = skipped;
    run.check("no_ray_enters_inclusion" + sn, entered_inclusion == 0, "points=" + std::to_string(entered_inclusion));
    const double collinearity_tol = cfg.rays.ode ? 1e-6 : 1e-9;
    run.check("exit_collinear" + sn, worst_offset < collinearity_tol, "max offset=" + csv::num(worst_offset));
    run.check("refraction_matches_inequality" + sn, inconsistent == 0, "mismatches=" + std::to_string(inconsistent));
    const RefractionReport rep = negative_refraction_predicate(s, src);
    int unpredicted = 0;
    for (const FaceRefraction& f : rep.faces)
      if (face_negative[static_cast<std::size_t>(f.face - 1)] > 0 && !f.negative()) ++unpredicted;
    run.check("predicate_covers_fan" + sn, unpredicted == 0, "faces with unpredicted events=" + std::to_string(unpredicted));
    run.bundle().values["negative_exits_right_face" + sn] = face_negative[0];
    run.write("refraction_" + src_name(src) + ".csv", [&](std::ostream& o) {
      csv::write_row(o, {"face", "exiting_rays", "negative_rays"});
      for (const FaceRefraction& f : rep.faces)
        csv::write_row(o, {std::to_string(f.face), std::to_string(f.exiting_rays), std::to_string(f.negative_rays)});
    });
  }
  run.write("rays.csv", [&](std::ostream& o) { o << rays.str(); });
  run.write("ray_events.csv", [&](std::ostream& o) { o << events.str(); });
  return run.finish();
}

ResultBundle run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  switch (cfg.scenario) {
    case ScenarioKind::cloak_demo: return run_cloak_demo(cfg, out_dir);
    case ScenarioKind::boundary_study: return run_boundary_study(cfg, out_dir);
    case ScenarioKind::freq_sweep: return run_freq_sweep(cfg, out_dir);
    case ScenarioKind::double_slit: return run_double_slit(cfg, out_dir);
    case ScenarioKind::lattice_compare: return run_lattice_compare(cfg, out_dir);
    case ScenarioKind::ray_diagram: return run_ray_diagram(cfg, out_dir);
  }
  throw ConfigError("unknown scenario");
}

}  // namespace cloaksim
