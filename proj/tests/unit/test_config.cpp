#include <gtest/gtest.h>

#include <sstream>

#include "cloaksim/config.hpp"

using namespace cloaksim;

namespace {

ExperimentConfig parse(const std::string& text, std::optional<ScenarioKind> fallback = std::nullopt) {
  std::istringstream in(text);
  return parse_config(in, fallback);
}

std::string dump(const ExperimentConfig& c) {
  std::ostringstream os;
  write_config(os, c);
  return os.str();
}

const ScenarioKind kAll[] = {ScenarioKind::cloak_demo,  ScenarioKind::boundary_study,  ScenarioKind::freq_sweep,
                             ScenarioKind::double_slit, ScenarioKind::lattice_compare, ScenarioKind::ray_diagram};

}  // namespace

TEST(Config, ScenarioNames) {
  for (ScenarioKind k : kAll) EXPECT_EQ(scenario_from_string(to_string(k)), k);
  EXPECT_THROW(scenario_from_string("cloak_demo"), ConfigError);
}

TEST(Config, DefaultsRoundTrip) {
  for (ScenarioKind k : kAll) {
    const ExperimentConfig c = default_config(k);
    EXPECT_NO_THROW(c.validate());
    const ExperimentConfig back = parse(dump(c));
    EXPECT_TRUE(back == c) << to_string(k);
    EXPECT_EQ(dump(back), dump(c));
  }
}

TEST(Config, BitExactRoundTrip) {
  ExperimentConfig c = default_config(ScenarioKind::cloak_demo);
  c.cloak.a = 0.1 + 0.2;
  c.cloak.w = 1.0 / 3.0;
  c.cloak.eps = 1e-6 / 7.0;
  c.cloak.mu = std::nextafter(1.0, 2.0);
  c.cloak.rho0 = 0.25;
  c.cloak.inner_bc = InnerBoundary::dirichlet;
  c.grid.h = 0.5 / 23.0;
  c.grid.pml.cells = 27;
  c.grid.pml.reflection = 3.3e-7;
  c.grid.pml.power = 2.5;
  c.sources = {Vec2(-3.0 / std::sqrt(2.0), 3.0 / std::sqrt(2.0)), Vec2(-2.75, 1e-3)};
  c.omegas = {3.0 * kPi, 0.1};
  c.regions = {ScatterRegion::r1, ScatterRegion::custom};
  c.region_polygon = {Vec2(2, 2), Vec2(3, 2), Vec2(3, 3.1)};
  c.rays.ode = true;
  c.field_stride = 3;
  c.seed = 123456789;
  const ExperimentConfig back = parse(dump(c));
  EXPECT_EQ(back.cloak.a, c.cloak.a);
  EXPECT_EQ(back.cloak.w, c.cloak.w);
  EXPECT_EQ(back.cloak.eps, c.cloak.eps);
  EXPECT_EQ(back.cloak.mu, c.cloak.mu);
  EXPECT_EQ(back.cloak.inner_bc, c.cloak.inner_bc);
  EXPECT_EQ(back.grid.h, c.grid.h);
  EXPECT_EQ(back.grid.pml, c.grid.pml);
  EXPECT_EQ(back.sources[0], c.sources[0]);
  EXPECT_EQ(back.omegas, c.omegas);
  EXPECT_EQ(back.regions, c.regions);
  EXPECT_EQ(back.region_polygon, c.region_polygon);
  EXPECT_TRUE(back.rays.ode);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_TRUE(back == c);
}

TEST(Config, ScenarioDefaultsApplyBeforeKeys) {
  const ExperimentConfig c = parse("omegas = 3\nscenario = lattice-compare\n");
  EXPECT_EQ(c.scenario, ScenarioKind::lattice_compare);
  EXPECT_EQ(c.cloak.w, 0.1);
  EXPECT_EQ(c.omegas, std::vector<double>{3.0});
  const ExperimentConfig f = parse("cloak.w = 0.25\n", ScenarioKind::boundary_study);
  EXPECT_EQ(f.scenario, ScenarioKind::boundary_study);
  EXPECT_EQ(f.cloak.inner_bc, InnerBoundary::neumann);
  EXPECT_EQ(f.cloak.w, 0.25);
}

TEST(Config, EpsFollowsInclusionSize) {
  EXPECT_DOUBLE_EQ(parse("cloak.a = 1.0\n").cloak.eps, 2e-6);
  EXPECT_DOUBLE_EQ(parse("cloak.a = 1.0\ncloak.eps = 1e-3\n").cloak.eps, 1e-3);
}

TEST(Config, CommentsAndWhitespace) {
  const ExperimentConfig c = parse("# header\n\n  cloak.mu0 =   0.2   # inline\n\tsources = -3,0 ; -2,1\n");
  EXPECT_EQ(c.cloak.mu0, 0.2);
  ASSERT_EQ(c.sources.size(), 2u);
  EXPECT_EQ(c.sources[1], Vec2(-2, 1));
}

TEST(Config, Errors) {
  EXPECT_THROW(parse("cloak.size = 1\n"), ConfigError);
  EXPECT_THROW(parse("cloak.a = 1\ncloak.a = 2\n"), ConfigError);
  EXPECT_THROW(parse("cloak.a = one\n"), ConfigError);
  EXPECT_THROW(parse("cloak.a 1\n"), ConfigError);
  EXPECT_THROW(parse("cloak.eps = 0\n"), Error);
  EXPECT_THROW(parse("omegas = 5, -1\n"), ConfigError);
  EXPECT_THROW(parse("sources = -3\n"), ConfigError);
  EXPECT_THROW(parse("rays.ode = yes\n"), ConfigError);
  EXPECT_THROW(parse("regions = r1, custom\n"), ConfigError);
  EXPECT_THROW(parse("scenario = ray-diagram\n", ScenarioKind::cloak_demo), ConfigError);
  EXPECT_THROW(parse("cloak.a = nan\n"), ConfigError);
  try {
    parse("\n\ncloak.typo = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/cloaksim.cfg"), ConfigError);
}
