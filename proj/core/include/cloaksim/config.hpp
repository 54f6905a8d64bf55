#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloaksim/analysis.hpp"
#include "cloaksim/cloak_map.hpp"
#include "cloaksim/grid.hpp"

namespace cloaksim {

enum class ScenarioKind { cloak_demo, boundary_study, freq_sweep, double_slit, lattice_compare, ray_diagram };

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_from_string(std::string_view name);

struct GridConfig {
  double h = 0.0;       // 0 selects the spacing from ppw
  double ppw = 60.0;    // ambient points per wavelength for the automatic spacing
  double margin = 0.3;  // free space around sources and regions
  PmlSpec pml;
};

struct SlitConfig {
  double aperture = 0.4;
  double separation = 2.0;       // centre to centre; the obstacle sits behind the slit at x2 = 0
  double screen_distance = 6.0;  // from the barrier
  double barrier_x1 = -1.5;
  double source_x1 = -2.2;       // plane-wave line
  double screen_half_span = 6.0;
  double thickness_cells = 2.0;
  int samples = 1201;
};

struct RayConfig {
  int count = 41;
  double t_max = 10.0;
  double spread = 0.0;  // half-angle of the fan in radians; 0 aims it at the cloak
  bool ode = false;     // integrate the characteristics instead of mapping rays
  double tol = 1e-9;
};

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::cloak_demo;
  CloakSpec cloak;
  GridConfig grid;
  std::vector<Vec2> sources;
  std::vector<double> omegas;
  std::vector<ScatterRegion> regions;  // empty: R1 plus R2 (axial) or R3 (diagonal) per source
  std::vector<Vec2> region_polygon;    // used by the custom region
  double floor = 5e-3;                 // numerical floor for the free-space baseline
  double lattice_ell = 0.01;
  SlitConfig slit;
  RayConfig rays;
  int field_stride = 0;  // 0 disables field dumps
  std::uint64_t seed = 0;

  /// Throws ConfigError (or DomainError) on inconsistent values.
  void validate() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Defaults of each experiment: the reference geometry, its sources and
/// frequencies; lattice-compare uses the thin cloak w = 0.1.
ExperimentConfig default_config(ScenarioKind kind);

/// Reads `key = value` lines ('#' starts a comment) on top of the defaults of
/// the file's `scenario` key, or of `fallback` when the key is absent. Unknown
/// or repeated keys and malformed values throw ConfigError with the line.
/// Setting cloak.a without cloak.eps scales eps with a (default_eps).
ExperimentConfig parse_config(std::istream& in, std::optional<ScenarioKind> fallback = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<ScenarioKind> fallback = std::nullopt);

/// Writes every key; parse_config of the output reproduces the config bit
/// for bit.
void write_config(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace cloaksim
