#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbe/scenario.hpp"

using namespace wbe;

namespace {

std::string field_of(const std::string& doc) {
  try {
    parse_scenario(doc);
  } catch (const ScenarioError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST(Scenario, BuiltInDefaults) {
  const ScenarioSpec s = parse_scenario("{}");
  EXPECT_EQ(s.mode, Mode::HedacNonStationary);
  EXPECT_EQ(s.horizon, 1000);
  EXPECT_EQ(s.domain.dims, 2);
  EXPECT_EQ(s.domain.shape[0], 75);
  EXPECT_TRUE(s.target.image.empty());
  EXPECT_TRUE(s.target.primitives.empty());
  EXPECT_EQ(s.chain.planarLinks, 5);
  ASSERT_EQ(s.agents.size(), 1u);
  EXPECT_EQ(s.agents[0].link, -1);
  EXPECT_EQ(s.smc.basis, 20);
  EXPECT_EQ(s.seeds(), (std::vector<std::uint64_t>{0}));
}

TEST(Scenario, DefaultsSectionThenDocument) {
  const ScenarioSpec s = parse_scenario(R"({
    "defaults": {"horizon": 50, "controller": {"alpha": 4.0, "nSteps": 3}, "seeds": {"count": 4}},
    "horizon": 70,
    "controller": {"nSteps": 2},
    "seeds": {"first": 10}
  })");
  EXPECT_EQ(s.horizon, 70);
  EXPECT_EQ(s.controller.diffusion.alpha[0], 4.0);
  EXPECT_EQ(s.controller.diffusion.nSteps, 2);
  EXPECT_EQ(s.controller.dt, 1.0);  // untouched built-in
  EXPECT_EQ(s.seeds(), (std::vector<std::uint64_t>{10, 11, 12, 13}));
}

TEST(Scenario, ModesAndAgents) {
  for (const char* m : {"hedac-nonstationary", "hedac-stationary", "smc", "passive"}) {
    const ScenarioSpec s = parse_scenario(std::string(R"({"mode": ")") + m + "\"}");
    EXPECT_EQ(to_string(s.mode), m);
  }
  EXPECT_EQ(parse_mode("search-pattern"), Mode::SearchPattern);
  EXPECT_THROW(parse_mode("random-walk"), ScenarioError);

  const ScenarioSpec s = parse_scenario(R"({
    "agents": [{"link": 4, "method": "equispaced", "spacing": 0.5},
               {"link": 3, "method": "points", "points": [[0.5, 0]], "active": false}],
    "activeLinks": [4]
  })");
  ASSERT_EQ(s.agents.size(), 2u);
  EXPECT_EQ(s.agents[1].method, AgentSpec::Method::Points);
  EXPECT_FALSE(s.agents[1].active);
  const ScenarioAssets a = build_assets(s);
  EXPECT_EQ(a.layout.size(), 3u + 1u);
  EXPECT_EQ(a.layout.active_links(), (std::set<int>{4}));
}

TEST(Scenario, PassiveKeepsOnlyTheTipActive) {
  ScenarioSpec s = parse_scenario(R"({"mode": "passive", "agents": [{"link": -1, "method": "equispaced", "spacing": 0.25}]})");
  const ScenarioAssets a = build_assets(s);
  int active = 0;
  for (const VirtualAgent& v : a.layout.agents())
    if (v.active) {
      ++active;
      EXPECT_TRUE(v.local.isApprox(a.chain.link(4).p1));
    }
  EXPECT_EQ(active, 1);
}

TEST(Scenario, ErrorsNameTheField) {
  EXPECT_EQ(field_of(R"({"horizon": 0})"), "horizon");
  EXPECT_EQ(field_of(R"({"horizon": 1.5})"), "horizon");
  EXPECT_EQ(field_of(R"({"mode": "dance"})"), "mode");
  EXPECT_EQ(field_of(R"({"controller": {"alpha": -1}})"), "controller.alpha");
  EXPECT_EQ(field_of(R"({"controller": {"dt": "fast"}})"), "controller.dt");
  EXPECT_EQ(field_of(R"({"domain": {"shape": [2, 75]}})"), "domain.shape");
  EXPECT_EQ(field_of(R"({"domain": {"spacing": [1, 1, 1]}})"), "domain.spacing");
  EXPECT_EQ(field_of(R"({"agents": []})"), "agents");
  EXPECT_EQ(field_of(R"({"agents": [{"link": 0, "method": "grid"}]})"), "agents[0].method");
  EXPECT_EQ(field_of(R"({"coverage": {"outOfBounds": "wrap"}})"), "coverage.outOfBounds");
  EXPECT_EQ(field_of(R"({"seeds": {"first": -2}})"), "seeds.first");
  EXPECT_EQ(field_of(R"({"target": {"primitives": [{"type": "ring"}]}})"), "target.primitives[0].type");
  EXPECT_EQ(field_of(R"({"mode": "search-pattern"})"), "mode");
  EXPECT_EQ(field_of(R"({"initial": {"configIndex": 2, "configs": [[0,0,0,0,0]]}})"), "initial.configIndex");
  EXPECT_EQ(field_of("{not json"), "<document>");
  EXPECT_EQ(field_of("[1, 2]"), "<document>");
  EXPECT_EQ(field_of(R"({"defaults": 3})"), "defaults");
  EXPECT_THROW(load_scenario("/nonexistent/x.json"), ScenarioError);
}

TEST(Scenario, AssetErrors) {
  EXPECT_THROW(build_assets(parse_scenario(R"({"agents": [{"link": 9, "method": "equispaced"}]})")), ScenarioError);
  EXPECT_THROW(build_assets(parse_scenario(R"({"activeLinks": []})")), ScenarioError);
  EXPECT_THROW(build_assets(parse_scenario(R"({"target": {"image": "missing.pgm"}})")), ScenarioError);
}

TEST(Scenario, SpatialModelAndPrimitives) {
  const std::string doc = R"({
    "domain": {"shape": [10, 10, 10], "spacing": [0.05, 0.05, 0.05], "origin": [0.2, -0.25, 0.1]},
    "chain": {"model": ")" + test::data_path("models/panda.model") + R"("},
    "target": {"primitives": [{"type": "gaussian", "mean": [0.45, 0, 0.35], "sigma": [0.1, 0.1, 0.1]}]},
    "agents": [{"link": 6, "method": "poisson", "radius": 0.04, "seed": 3}]
  })";
  const ScenarioAssets a = build_assets(parse_scenario(doc));
  EXPECT_EQ(a.domain.dims(), 3);
  EXPECT_EQ(a.chain.size(), 7);
  EXPECT_NEAR(a.target.field().integral(), 1.0, 1e-12);
  EXPECT_GE(a.layout.size(), 2u);
}
