#pragma once

#include <map>
#include <string>
#include <vector>

#include "cloaksim/analysis.hpp"
#include "cloaksim/config.hpp"
#include "cloaksim/grid.hpp"

namespace cloaksim {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SolveRecord {
  std::string label;
  double omega = 0.0;
  double h = 0.0;
  int n1 = 0;
  int n2 = 0;
  std::string solver;
  std::string residual;
  double seconds = 0.0;
};

/// Everything one experiment produced. Files are written only when the
/// output directory is non-empty; their names are relative to it.
struct ResultBundle {
  ScenarioKind scenario = ScenarioKind::cloak_demo;
  std::string out_dir;
  std::vector<std::string> files;
  std::vector<MeasureReport> measures;
  std::vector<Check> checks;
  std::vector<SolveRecord> solves;
  std::map<std::string, double> values;  // named scalar results

  bool passed() const;
  const Check* find_check(const std::string& name) const;
};

/// Spacing a / N with w / h integral, the smallest N meeting `ppw` ambient
/// points per wavelength at omega and h <= a / 20.
double auto_spacing(const CloakSpec& spec, double omega, double ppw);

/// Spacing used for a continuum run: grid.h if set, else auto_spacing.
double experiment_spacing(const ExperimentConfig& cfg, double omega);

/// Grid whose interior covers `need` plus the configured margin, with the
/// cloak kept at least 10 cells clear of the absorbing layer.
Grid experiment_grid(const ExperimentConfig& cfg, double h, const Rect& need);

/// Regions measured for one source: the configured list, or R1 plus R2 for
/// a source on an axis and R1 plus R3 for a diagonal one.
std::vector<Region> experiment_regions(const ExperimentConfig& cfg, const Vec2& source);

/// Runs the experiment named by cfg.scenario. Writes config.txt, run.log,
/// checks.csv and the experiment's CSV files into out_dir when given.
ResultBundle run_experiment(const ExperimentConfig& cfg, const std::string& out_dir = "");

ResultBundle run_cloak_demo(const ExperimentConfig& cfg, const std::string& out_dir = "");
ResultBundle run_boundary_study(const ExperimentConfig& cfg, const std::string& out_dir = "");
ResultBundle run_freq_sweep(const ExperimentConfig& cfg, const std::string& out_dir = "");
ResultBundle run_double_slit(const ExperimentConfig& cfg, const std::string& out_dir = "");
ResultBundle run_lattice_compare(const ExperimentConfig& cfg, const std::string& out_dir = "");
ResultBundle run_ray_diagram(const ExperimentConfig& cfg, const std::string& out_dir = "");

}  // namespace cloaksim
