// Command line front end: run, batch, bench, validate.
#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "wbe/experiment.hpp"
#include "wbe/field_io.hpp"

namespace fs = std::filesystem;
using namespace wbe;

namespace {

struct Common {
  std::string scenario;
  std::string outDir = "out";
  bool deterministic = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("scenario", c.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", c.outDir, "Output directory");
  cmd->add_flag("--deterministic", c.deterministic,
                "Single thread, wall-clock column zeroed (byte-reproducible logs)");
}

RunOptions options(const Common& c, bool snapshots) {
  RunOptions o;
  o.deterministic = c.deterministic;
  if (snapshots) o.snapshotDir = (fs::path(c.outDir) / "snapshots").string();
  return o;
}

void print_run(const RunLog& log) {
  std::cout << log.scenario << " seed " << log.seed << ": " << log.records.size() << " steps, final epsilon "
            << std::setprecision(6) << log.finalEpsilon;
  if (log.sphere) {
    if (log.stepsToContact) std::cout << ", contact at step " << *log.stepsToContact << " (link " << log.contactLink << ")";
    else std::cout << ", no contact";
  }
  std::cout << ", " << std::setprecision(3) << log.meanStepMs << " ms/step\n";
  for (const std::string& w : log.warnings) std::cout << "  warning: " << w << '\n';
}

void print_phase(const char* name, const PhaseStats& s) {
  std::cout << std::left << std::setw(11) << name << std::right << std::fixed << std::setprecision(3)
            << std::setw(10) << s.mean << std::setw(10) << s.median << std::setw(10) << s.p95 << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whole-body ergodic exploration simulator"};
  app.require_subcommand(1);

  Common runArgs;
  std::uint64_t seed = 0;
  bool snapshots = false;
  auto* run = app.add_subcommand("run", "Run one scenario seed and write its log");
  add_common(run, runArgs);
  run->add_option("-s,--seed", seed, "Seed");
  run->add_flag("--snapshots", snapshots, "Write field snapshots at the scenario's interval");

  Common batchArgs;
  std::optional<std::uint64_t> firstSeed;
  std::optional<int> seedCount;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool perRun = false;
  auto* batch = app.add_subcommand("batch", "Run a seed sweep and write aggregate statistics");
  add_common(batch, batchArgs);
  batch->add_option("--first-seed", firstSeed, "First seed (default: scenario)");
  batch->add_option("-n,--seed-count", seedCount, "Number of seeds (default: scenario)")->check(CLI::PositiveNumber);
  batch->add_option("-j,--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  batch->add_flag("--per-run", perRun, "Also write every run log");

  Common benchArgs;
  long benchSteps = 50;
  long warmup = 5;
  auto* bench = app.add_subcommand("bench", "Per-step timing of the whole-body controller");
  add_common(bench, benchArgs);
  bench->add_option("--steps", benchSteps, "Timed steps")->check(CLI::PositiveNumber);
  bench->add_option("--warmup", warmup, "Untimed steps first");
  bench->add_option("-s,--seed", seed, "Seed");

  std::string lintPath;
  auto* validate = app.add_subcommand("validate", "Check a scenario and its referenced files");
  validate->add_option("scenario", lintPath, "Scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const ScenarioSpec spec = load_scenario(lintPath);
      const ScenarioAssets assets = build_assets(spec);
      std::cout << "ok: " << spec.name << " (" << to_string(spec.mode) << ", " << assets.domain.dims() << "D "
                << assets.domain.cell_count() << " cells, " << assets.chain.size() << " joints, "
                << assets.layout.size() << " agents on " << assets.layout.active_links().size()
                << " active links, horizon " << spec.horizon << ", " << spec.seedCount << " seeds)\n";
      return 0;
    }

    if (*run) {
      const ScenarioSpec spec = load_scenario(runArgs.scenario);
      const ScenarioAssets assets = build_assets(spec);
      fs::create_directories(runArgs.outDir);
      const RunLog log = run_scenario(spec, assets, seed, options(runArgs, snapshots));
      const std::string stem = (fs::path(runArgs.outDir) / (spec.name + "_seed" + std::to_string(seed))).string();
      write_run_csv(log, stem + ".csv");
      const fs::path out(runArgs.outDir);
      write_layout_csv(assets.layout, (out / (spec.name + "_layout.csv")).string());
      write_chain_model(assets.chain, (out / (spec.name + "_chain.model")).string());
      write_field_csv(assets.target.field(), (out / (spec.name + "_target.csv")).string());
      if (log.sphere) write_contact_csv({log}, spec.horizon, stem + "_contact.csv");
      print_run(log);
      return 0;
    }

    if (*batch) {
      ScenarioSpec spec = load_scenario(batchArgs.scenario);
      if (firstSeed) spec.firstSeed = *firstSeed;
      if (seedCount) spec.seedCount = *seedCount;
      fs::create_directories(batchArgs.outDir);
      const int workers = batchArgs.deterministic ? 1 : threads;
      const BatchResult res = run_batch(spec, spec.seeds(), workers, options(batchArgs, false));
      const fs::path out(batchArgs.outDir);
      write_aggregate_csv(res.aggregate, (out / (spec.name + "_aggregate.csv")).string());
      if (spec.contact.enabled) write_contact_csv(res.runs, spec.horizon, (out / (spec.name + "_contact.csv")).string());
      if (perRun)
        for (const RunLog& log : res.runs)
          write_run_csv(log, (out / (spec.name + "_seed" + std::to_string(log.seed) + ".csv")).string());
      for (const RunLog& log : res.runs) print_run(log);
      if (!res.aggregate.empty())
        std::cout << "mean final epsilon " << res.aggregate.back().mean << " (std " << res.aggregate.back().stddev
                  << ", " << res.runs.size() << " runs)\n";
      return 0;
    }

    if (*bench) {
      const ScenarioSpec spec = load_scenario(benchArgs.scenario);
      const TimingReport r = timing_report(spec, benchSteps, warmup, seed);
      std::cout << spec.name << ": " << r.steps << " steps (ms)\n";
      std::cout << std::left << std::setw(11) << "phase" << std::right << std::setw(10) << "mean" << std::setw(10)
                << "median" << std::setw(10) << "p95" << '\n';
      print_phase("total", r.total);
      print_phase("coverage", r.coverage);
      print_phase("diffusion", r.diffusion);
      print_phase("consensus", r.consensus);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
