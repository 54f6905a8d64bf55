#include "cloaksim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "cloaksim/csv.hpp"

namespace cloaksim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  if (s == "nan" || s == "inf" || s == "-inf") throw ConfigError("non-finite number '" + s + "'");
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw ConfigError("bad number '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw ConfigError("bad integer '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const std::string& item : split(s, ',')) out.push_back(parse_double(item));
  return out;
}

std::vector<Vec2> parse_points(const std::string& s) {
  std::vector<Vec2> out;
  if (s.empty()) return out;
  for (const std::string& item : split(s, ';')) {
    const auto xy = split(item, ',');
    if (xy.size() != 2) throw ConfigError("expected 'x1,x2' point, got '" + item + "'");
    out.emplace_back(parse_double(xy[0]), parse_double(xy[1]));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + csv::num(v[k]);
  return out;
}

std::string join(const std::vector<Vec2>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "; " : "") + csv::num(v[k][0]) + "," + csv::num(v[k][1]);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Key {
  const char* name;
  Setter set;
  Getter get;
};

template <class M>
Key number(const char* name, M member) {
  return {name, [member](ExperimentConfig& c, const std::string& v) { std::invoke(member, c) = parse_double(v); },
          [member](const ExperimentConfig& c) { return csv::num(std::invoke(member, c)); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"scenario", [](ExperimentConfig& c, const std::string& v) { c.scenario = scenario_from_string(v); },
       [](const ExperimentConfig& c) { return std::string(to_string(c.scenario)); }},
      number("cloak.a", [](auto& c) -> auto& { return c.cloak.a; }),
      number("cloak.w", [](auto& c) -> auto& { return c.cloak.w; }),
      number("cloak.eps", [](auto& c) -> auto& { return c.cloak.eps; }),
      number("cloak.mu", [](auto& c) -> auto& { return c.cloak.mu; }),
      number("cloak.rho", [](auto& c) -> auto& { return c.cloak.rho; }),
      number("cloak.mu0", [](auto& c) -> auto& { return c.cloak.mu0; }),
      number("cloak.rho0", [](auto& c) -> auto& { return c.cloak.rho0; }),
      {"cloak.inner_bc",
       [](ExperimentConfig& c, const std::string& v) { c.cloak.inner_bc = inner_boundary_from_string(v); },
       [](const ExperimentConfig& c) { return std::string(to_string(c.cloak.inner_bc)); }},
      number("grid.h", [](auto& c) -> auto& { return c.grid.h; }),
      number("grid.ppw", [](auto& c) -> auto& { return c.grid.ppw; }),
      number("grid.margin", [](auto& c) -> auto& { return c.grid.margin; }),
      {"grid.pml_cells",
       [](ExperimentConfig& c, const std::string& v) { c.grid.pml.cells = static_cast<int>(parse_int(v)); },
       [](const ExperimentConfig& c) { return std::to_string(c.grid.pml.cells); }},
      number("grid.pml_reflection", [](auto& c) -> auto& { return c.grid.pml.reflection; }),
      number("grid.pml_power", [](auto& c) -> auto& { return c.grid.pml.power; }),
      {"sources", [](ExperimentConfig& c, const std::string& v) { c.sources = parse_points(v); },
       [](const ExperimentConfig& c) { return join(c.sources); }},
      {"omegas", [](ExperimentConfig& c, const std::string& v) { c.omegas = parse_list(v); },
       [](const ExperimentConfig& c) { return join(c.omegas); }},
      {"regions",
       [](ExperimentConfig& c, const std::string& v) {
         c.regions.clear();
         if (v == "auto") return;
         for (const std::string& r : split(v, ',')) c.regions.push_back(scatter_region_from_string(r));
       },
       [](const ExperimentConfig& c) {
         if (c.regions.empty()) return std::string("auto");
         std::string out;
         for (std::size_t k = 0; k < c.regions.size(); ++k) out += (k ? "," : "") + std::string(to_string(c.regions[k]));
         return out;
       }},
      {"region.polygon", [](ExperimentConfig& c, const std::string& v) { c.region_polygon = parse_points(v); },
       [](const ExperimentConfig& c) { return join(c.region_polygon); }},
      number("floor", [](auto& c) -> auto& { return c.floor; }),
      number("lattice.ell", [](auto& c) -> auto& { return c.lattice_ell; }),
      number("slit.aperture", [](auto& c) -> auto& { return c.slit.aperture; }),
      number("slit.separation", [](auto& c) -> auto& { return c.slit.separation; }),
      number("slit.screen_distance", [](auto& c) -> auto& { return c.slit.screen_distance; }),
      number("slit.barrier_x1", [](auto& c) -> auto& { return c.slit.barrier_x1; }),
      number("slit.source_x1", [](auto& c) -> auto& { return c.slit.source_x1; }),
      number("slit.screen_half_span", [](auto& c) -> auto& { return c.slit.screen_half_span; }),
      number("slit.thickness_cells", [](auto& c) -> auto& { return c.slit.thickness_cells; }),
      {"slit.samples", [](ExperimentConfig& c, const std::string& v) { c.slit.samples = static_cast<int>(parse_int(v)); },
       [](const ExperimentConfig& c) { return std::to_string(c.slit.samples); }},
      {"rays.count", [](ExperimentConfig& c, const std::string& v) { c.rays.count = static_cast<int>(parse_int(v)); },
       [](const ExperimentConfig& c) { return std::to_string(c.rays.count); }},
      number("rays.t_max", [](auto& c) -> auto& { return c.rays.t_max; }),
      number("rays.spread", [](auto& c) -> auto& { return c.rays.spread; }),
      {"rays.ode", [](ExperimentConfig& c, const std::string& v) { c.rays.ode = parse_bool(v); },
       [](const ExperimentConfig& c) { return std::string(c.rays.ode ? "true" : "false"); }},
      number("rays.tol", [](auto& c) -> auto& { return c.rays.tol; }),
      {"output.field_stride",
       [](ExperimentConfig& c, const std::string& v) { c.field_stride = static_cast<int>(parse_int(v)); },
       [](const ExperimentConfig& c) { return std::to_string(c.field_stride); }},
      {"seed",
       [](ExperimentConfig& c, const std::string& v) {
         const long long s = parse_int(v);
         if (s < 0) throw ConfigError("seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
  };
  return table;
}

const Key* find_key(std::string_view name) {
  for (const Key& k : keys())
    if (name == k.name) return &k;
  return nullptr;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::cloak_demo: return "cloak-demo";
    case ScenarioKind::boundary_study: return "boundary-study";
    case ScenarioKind::freq_sweep: return "freq-sweep";
    case ScenarioKind::double_slit: return "double-slit";
    case ScenarioKind::lattice_compare: return "lattice-compare";
    case ScenarioKind::ray_diagram: return "ray-diagram";
  }
  return "cloak-demo";
}

ScenarioKind scenario_from_string(std::string_view name) {
  for (ScenarioKind k : {ScenarioKind::cloak_demo, ScenarioKind::boundary_study, ScenarioKind::freq_sweep,
                         ScenarioKind::double_slit, ScenarioKind::lattice_compare, ScenarioKind::ray_diagram})
    if (name == to_string(k)) return k;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  cloak.validate();
  if (!(grid.h >= 0.0)) throw ConfigError("grid.h must be >= 0");
  if (!(grid.ppw > 0.0)) throw ConfigError("grid.ppw must be positive");
  if (!(grid.margin >= 0.0)) throw ConfigError("grid.margin must be >= 0");
  if (grid.pml.cells < 1) throw ConfigError("grid.pml_cells must be at least 1");
  if (!(grid.pml.reflection > 0.0 && grid.pml.reflection < 1.0))
    throw ConfigError("grid.pml_reflection must lie in (0, 1)");
  if (!(grid.pml.power >= 0.0)) throw ConfigError("grid.pml_power must be >= 0");
  for (double w : omegas)
    if (!(w > 0.0 && std::isfinite(w))) throw ConfigError("omegas must be positive");
  if (scenario != ScenarioKind::ray_diagram && omegas.empty()) throw ConfigError("omegas must not be empty");
  if (scenario != ScenarioKind::double_slit && sources.empty()) throw ConfigError("sources must not be empty");
  for (ScatterRegion r : regions)
    if (r == ScatterRegion::custom && region_polygon.size() < 3)
      throw ConfigError("region.polygon needs at least three points for the custom region");
  if (!(floor > 0.0)) throw ConfigError("floor must be positive");
  if (!(lattice_ell > 0.0)) throw ConfigError("lattice.ell must be positive");
  if (!(slit.aperture > 0.0 && slit.separation > slit.aperture))
    throw ConfigError("slits need 0 < aperture < separation");
  if (!(slit.screen_distance > 0.0 && slit.screen_half_span > 0.0 && slit.thickness_cells > 0.0))
    throw ConfigError("slit distances must be positive");
  if (slit.samples < 3) throw ConfigError("slit.samples must be at least 3");
  if (rays.count < 1) throw ConfigError("rays.count must be at least 1");
  if (!(rays.t_max > 0.0 && rays.tol > 0.0 && rays.spread >= 0.0 && rays.spread < kPi))
    throw ConfigError("rays.t_max and rays.tol must be positive, rays.spread in [0, pi)");
  if (field_stride < 0) throw ConfigError("output.field_stride must be >= 0");
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  std::ostringstream sa;
  std::ostringstream sb;
  write_config(sa, a);
  write_config(sb, b);
  return sa.str() == sb.str();
}

ExperimentConfig default_config(ScenarioKind kind) {
  ExperimentConfig c;
  c.scenario = kind;
  const Vec2 axial(-3.0, 0.0);
  const Vec2 diagonal(-3.0 / std::sqrt(2.0), 3.0 / std::sqrt(2.0));
  switch (kind) {
    case ScenarioKind::cloak_demo:
      c.sources = {axial, diagonal};
      c.omegas = {5.0, 10.0};
      break;
    case ScenarioKind::boundary_study:
      c.sources = {axial};
      c.omegas = {5.0, 10.0};
      c.cloak.inner_bc = InnerBoundary::neumann;
      break;
    case ScenarioKind::freq_sweep:
      c.sources = {axial};
      for (int k = 2; k <= 24; ++k) c.omegas.push_back(0.5 * k);
      break;
    case ScenarioKind::double_slit:
      // Slit spacing of three wavelengths.
      c.omegas = {3.0 * kPi};
      break;
    case ScenarioKind::lattice_compare:
      c.cloak.w = 0.1;
      c.sources = {axial, diagonal};
      c.omegas = {3.0, 5.0};
      break;
    case ScenarioKind::ray_diagram:
      c.sources = {axial};
      break;
  }
  return c;
}

ExperimentConfig parse_config(std::istream& in, std::optional<ScenarioKind> fallback) {
  std::vector<std::pair<int, std::pair<std::string, std::string>>> entries;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  std::optional<ScenarioKind> declared;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    auto fail = [&](const std::string& msg) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + msg);
    };
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!find_key(key)) fail("unknown key '" + key + "'");
    if (!seen.insert(key).second) fail("repeated key '" + key + "'");
    if (key == "scenario") {
      try {
        declared = scenario_from_string(value);
      } catch (const ConfigError& e) {
        fail(e.what());
      }
    }
    entries.push_back({lineno, {key, value}});
  }
  if (declared && fallback && *declared != *fallback)
    throw ConfigError("config declares scenario '" + std::string(to_string(*declared)) + "' but '" +
                      std::string(to_string(*fallback)) + "' was requested");
  ExperimentConfig cfg = default_config(declared.value_or(fallback.value_or(ScenarioKind::cloak_demo)));
  for (const auto& [n, kv] : entries) {
    try {
      find_key(kv.first)->set(cfg, kv.second);
    } catch (const Error& e) {
      throw ConfigError("config line " + std::to_string(n) + " (" + kv.first + "): " + e.what());
    }
  }
  // The regularisation follows the inclusion size unless given explicitly.
  if (seen.count("cloak.a") && !seen.count("cloak.eps")) cfg.cloak.eps = default_eps(cfg.cloak.a);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<ScenarioKind> fallback) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in, fallback);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  for (const Key& k : keys()) out << k.name << " = " << k.get(cfg) << '\n';
}

}  // namespace cloaksim
