// cloaksim: runs the cloak experiments from a key = value config file.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cloaksim/config.hpp"
#include "cloaksim/csv.hpp"
#include "cloaksim/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

void print_summary(const cloaksim::ResultBundle& r) {
  using cloaksim::csv::num;
  for (const auto& s : r.solves)
    std::printf("solve %-40s omega=%-8s h=%-10s %dx%d %s %.1fs\n", s.label.c_str(), num(s.omega).c_str(),
                num(s.h).c_str(), s.n1, s.n2, s.solver.c_str(), s.seconds);
  if (!r.measures.empty()) {
    std::printf("%-10s %-8s %-14s %-6s %-12s %-12s %-12s %-10s\n", "run", "omega", "source", "region", "E_base",
                "E_uncloak", "E_cloak", "Q");
    for (const auto& m : r.measures) {
      const std::string src = num(m.source[0]) + "," + num(m.source[1]);
      std::printf("%-10s %-8s %-14s %-6s %-12.4e %-12.4e %-12.4e %-10.6f\n", m.scenario.c_str(), num(m.omega).c_str(),
                  src.c_str(), std::string(to_string(m.region)).c_str(), m.E_baseline, m.E_uncloaked, m.E_cloaked,
                  m.Q);
    }
  }
  for (const auto& [k, v] : r.values) std::printf("%s = %s\n", k.c_str(), num(v).c_str());
  for (const auto& c : r.checks)
    std::printf("%s %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  if (!r.out_dir.empty()) std::printf("wrote %zu files to %s\n", r.files.size(), r.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularised square cloak simulations for the 2D Helmholtz equation"};
  app.require_subcommand(1);

  std::string scenario;
  std::string config_path;
  std::string out_dir;
  std::vector<double> omegas;
  double grid_h = 0.0;
  int field_stride = -1;
  auto* run = app.add_subcommand("run", "Run one experiment and write its results");
  run->add_option("scenario", scenario,
                  "cloak-demo | boundary-study | freq-sweep | double-slit | lattice-compare | ray-diagram")
      ->required();
  run->add_option("--config", config_path, "Config file (key = value lines)");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--omega", omegas, "Override the frequency list (repeatable)");
  run->add_option("--grid-h", grid_h, "Override the grid spacing")->check(CLI::PositiveNumber);
  run->add_option("--field-stride", field_stride, "Dump fields every n-th node (0 disables)")
      ->check(CLI::NonNegativeNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate-config", "Parse and check a config file");
  validate->add_option("file", validate_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*validate) {
      const cloaksim::ExperimentConfig cfg = cloaksim::load_config(validate_path);
      cloaksim::write_config(std::cout, cfg);
      std::cerr << validate_path << ": ok (" << to_string(cfg.scenario) << ")\n";
      return kExitOk;
    }
    const cloaksim::ScenarioKind kind = cloaksim::scenario_from_string(scenario);
    cloaksim::ExperimentConfig cfg =
        config_path.empty() ? cloaksim::default_config(kind) : cloaksim::load_config(config_path, kind);
    if (cfg.scenario != kind)
      throw cloaksim::ConfigError("config declares scenario '" + std::string(to_string(cfg.scenario)) +
                                  "' but '" + scenario + "' was requested");
    if (!omegas.empty()) cfg.omegas = omegas;
    if (grid_h > 0.0) cfg.grid.h = grid_h;
    if (field_stride >= 0) cfg.field_stride = field_stride;
    cfg.validate();
    const cloaksim::ResultBundle result = cloaksim::run_experiment(cfg, out_dir);
    print_summary(result);
    return result.passed() ? kExitOk : kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
