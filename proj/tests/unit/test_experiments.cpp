#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cloaksim/experiments.hpp"

using namespace cloaksim;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cloaksim_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_demo() {
  std::istringstream in(
      "scenario = cloak-demo\n"
      "cloak.a = 0.05\n"
      "cloak.w = 0.05\n"
      "sources = -0.3,0\n"
      "omegas = 10\n"
      "grid.margin = 0.05\n");
  return parse_config(in);
}

}  // namespace

TEST(AutoSpacing, ResolvesWavelengthAndFrame) {
  const CloakSpec s;
  EXPECT_NEAR(auto_spacing(s, 5.0, 60.0), 0.5 / 24.0, 1e-15);
  EXPECT_NEAR(auto_spacing(s, 10.0, 60.0), 0.5 / 48.0, 1e-15);
  EXPECT_NEAR(auto_spacing(s, 1.0, 60.0), 0.5 / 20.0, 1e-15);
  CloakSpec t;
  t.w = 0.1;
  for (double omega : {1.0, 3.0, 5.0, 7.3}) {
    const double h = auto_spacing(t, omega, 60.0);
    EXPECT_LE(h, 2 * kPi / (omega * 60.0) + 1e-15);
    EXPECT_NEAR(t.w / h, std::round(t.w / h), 1e-9);
    EXPECT_NEAR(t.a / h, std::round(t.a / h), 1e-9);
  }
  EXPECT_THROW(auto_spacing(s, 0.0, 60.0), DomainError);
}

TEST(ExperimentGrid, ExplicitSpacingWins) {
  ExperimentConfig c = default_config(ScenarioKind::cloak_demo);
  c.grid.h = 0.03;
  EXPECT_EQ(experiment_spacing(c, 5.0), 0.03);
  const Grid g = experiment_grid(c, 0.025, Rect{-3.0, 4.0, -4.0, 4.0});
  EXPECT_TRUE(g.interior().contains(Vec2(-3.3, -4.3), 1e-9));
  EXPECT_TRUE(g.interior().contains(Vec2(4.3, 4.3), 1e-9));
}

TEST(ExperimentRegions, FollowSourceOrientation) {
  ExperimentConfig c = default_config(ScenarioKind::cloak_demo);
  auto kinds = [&](const Vec2& src) {
    std::vector<ScatterRegion> out;
    for (const Region& r : experiment_regions(c, src)) out.push_back(r.kind);
    return out;
  };
  EXPECT_EQ(kinds(Vec2(-3, 0)), (std::vector{ScatterRegion::r1, ScatterRegion::r2}));
  EXPECT_EQ(kinds(Vec2(-3, 3) / std::sqrt(2.0)), (std::vector{ScatterRegion::r1, ScatterRegion::r3}));
  c.regions = {ScatterRegion::custom};
  c.region_polygon = {Vec2(2, -1), Vec2(3, -1), Vec2(3, 1)};
  const auto r = experiment_regions(c, Vec2(-3, 0));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].polygon, c.region_polygon);
}

TEST(RayDiagram, ChecksPassAndOutputsAreDeterministic) {
  ExperimentConfig c = default_config(ScenarioKind::ray_diagram);
  c.sources = {Vec2(-3, 0), Vec2(-2, 2)};
  const fs::path d1 = scratch_dir("rays1");
  const fs::path d2 = scratch_dir("rays2");
  const ResultBundle r1 = run_experiment(c, d1.string());
  const ResultBundle r2 = run_experiment(c, d2.string());
  for (const Check& chk : r1.checks) EXPECT_TRUE(chk.passed) << chk.name << ": " << chk.detail;
  EXPECT_TRUE(r1.passed());
  EXPECT_GT(r1.values.at("negative_exits_right_face[src=-3_0]"), 0.0);
  for (const std::string& f : r1.files) EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  EXPECT_EQ(slurp(d1 / "rays.csv").rfind("ray,source_x1,source_x2,t,x1,x2,s1,s2,region\n", 0), 0u);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(CloakDemo, SmallGeometryRun) {
  const ExperimentConfig c = small_demo();
  const fs::path dir = scratch_dir("demo");
  const ResultBundle r = run_experiment(c, dir.string());
  EXPECT_EQ(r.solves.size(), 3u);
  ASSERT_EQ(r.measures.size(), 2u);
  for (const MeasureReport& m : r.measures) {
    EXPECT_LT(m.E_baseline, c.floor);
    EXPECT_LT(m.E_cloaked, m.E_uncloaked);
  }
  EXPECT_TRUE(r.passed());
  for (const char* f : {"config.txt", "run.log", "checks.csv", "measures.csv"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_TRUE(load_config((dir / "config.txt").string()) == c);
  const std::string log = slurp(dir / "run.log");
  EXPECT_NE(log.find("pml_reflection="), std::string::npos);
  EXPECT_NE(log.find("solver=umfpack"), std::string::npos);
  fs::remove_all(dir);
}

TEST(CloakDemo, NoFilesWithoutOutputDirectory) {
  ExperimentConfig c = default_config(ScenarioKind::ray_diagram);
  c.rays.count = 5;
  const ResultBundle r = run_experiment(c);
  EXPECT_TRUE(r.files.empty());
  EXPECT_FALSE(r.checks.empty());
}

TEST(DoubleSlit, RejectsInconsistentGeometry) {
  ExperimentConfig c = default_config(ScenarioKind::double_slit);
  c.slit.barrier_x1 = -0.5;
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = default_config(ScenarioKind::double_slit);
  c.slit.source_x1 = -1.0;
  EXPECT_THROW(run_experiment(c), ConfigError);
}
