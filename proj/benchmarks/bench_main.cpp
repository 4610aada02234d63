#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "wbe/controller.hpp"
#include "wbe/coverage.hpp"
#include "wbe/diffusion.hpp"
#include "wbe/experiment.hpp"
#include "wbe/metrics.hpp"
#include "wbe/scenario.hpp"

using namespace wbe;

namespace {

ScenarioAssets cube(const char* name) {
  return build_assets(load_scenario(std::string(WBE_BENCH_SCENARIO_DIR) + "/" + name));
}

ScalarField noise(const GridDomain& d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarField f(d);
  for (double& v : f.values()) v = u(rng);
  return f;
}

void diffusion(benchmark::State& state, const GridDomain& d, double alpha) {
  const DiffusionParams p = DiffusionParams::isotropic(alpha);
  const double dt = cfl_timestep(p, d);
  ScalarField u = noise(d, 1), s = noise(d, 2), scratch(d);
  for (auto _ : state) {
    diffuse_in_place(u, s, p, dt, 1, scratch);
    benchmark::DoNotOptimize(u.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(u.values().size()));
}

void BM_Diffuse2D(benchmark::State& state) {
  diffusion(state, GridDomain::planar(75, 75, 1, 1), 10.0);
}
BENCHMARK(BM_Diffuse2D);

void BM_Diffuse3D(benchmark::State& state) {
  diffusion(state, cube("cube_tip.json").domain, 1e-4);
}
BENCHMARK(BM_Diffuse3D)->Unit(benchmark::kMillisecond);

void BM_CoverageUpdate3D(benchmark::State& state) {
  const ScenarioAssets a = cube("cube_tip3.json");
  const JointConfig q = Eigen::VectorXd::Zero(a.chain.size());
  const std::vector<Point> x = a.layout.positions(forward_kinematics(a.chain, q));
  CoverageAccumulator cov(a.domain, 0.01, OutOfBounds::Clamp);
  for (auto _ : state) {
    cov.deposit(x);
    const ScalarField c = normalized_coverage(cov);
    benchmark::DoNotOptimize(residual_and_source(a.target, c));
    benchmark::DoNotOptimize(ergodicity(a.target, c));
  }
}
BENCHMARK(BM_CoverageUpdate3D)->Unit(benchmark::kMillisecond);

// Consensus solve only; state.range(0) picks the one- or three-link scenario.
void BM_Consensus(benchmark::State& state) {
  const ScenarioAssets a = cube(state.range(0) == 1 ? "cube_tip.json" : "cube_tip3.json");
  const ScalarField u = noise(a.domain, 3);
  const JointConfig q = Eigen::VectorXd::Constant(a.chain.size(), -0.3);
  for (auto _ : state) {
    const LinkFrames f = forward_kinematics(a.chain, q);
    benchmark::DoNotOptimize(consensus_command(a.chain, f, a.layout, u, 0.01, 1e6).qdot);
  }
}
BENCHMARK(BM_Consensus)->Arg(1)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_ControlStep3D(benchmark::State& state) {
  ScenarioSpec spec = load_scenario(std::string(WBE_BENCH_SCENARIO_DIR) +
                                    (state.range(0) == 1 ? "/cube_tip.json" : "/cube_tip3.json"));
  for (auto _ : state) {
    const TimingReport r = timing_report(spec, 10, 1);
    state.counters["median_ms"] = r.total.median;
  }
}
BENCHMARK(BM_ControlStep3D)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
