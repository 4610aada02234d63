#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbe/scenario.hpp"

namespace wbe {

struct Sphere {
  Point center = Point::Zero();
  double radius = 0.0;
};

struct ContactResult {
  bool contact = false;
  int link = -1;  // closest contacting link
  double clearance = 0.0;  // distance minus threshold of the closest link checked
};

/// Closed test: a link touches when the distance from the sphere centre to its
/// segment is <= link radius + sphere radius.
ContactResult contact_check(const KinematicChain& chain, const LinkFrames& frames,
                            const std::vector<int>& links, const Sphere& sphere);
ContactResult contact_check(const KinematicChain& chain, const JointConfig& q,
                            const std::vector<int>& links, const Sphere& sphere);

struct RunRecord {
  long t = 0;
  double epsilon = 0.0;
  std::vector<double> q;            // configuration whose deposit produced epsilon
  std::vector<double> linkWeights;  // normalized, per RunLog::weightLinks
  double qdotNorm = 0.0;
  int clamped = 0;
  double wallMs = 0.0;
};

struct RunLog {
  std::string scenario;
  Mode mode = Mode::HedacNonStationary;
  std::uint64_t seed = 0;
  int joints = 0;
  std::vector<int> weightLinks;
  std::vector<RunRecord> records;

  // Terminal summary.
  double finalEpsilon = 0.0;
  std::optional<long> stepsToContact;
  int contactLink = -1;
  std::optional<Sphere> sphere;
  double meanStepMs = 0.0;
  std::vector<std::string> warnings;
};

struct RunOptions {
  /// Zero the wall-clock column so logs are byte-comparable.
  bool deterministic = false;
  /// Directory for field snapshots; empty disables them.
  std::string snapshotDir;
};

/// Initial configuration of run `seed`.
JointConfig initial_configuration(const ScenarioSpec& spec, const ScenarioAssets& assets,
                                  std::uint64_t seed, const std::optional<Sphere>& sphere);

/// Sphere placement of run `seed` in contact mode, drawn from its own stream.
/// With listed initial configurations, draws touching any of them are
/// redrawn, so every scenario sharing the list sees the same spheres.
Sphere sample_sphere(const ScenarioSpec& spec, const ScenarioAssets& assets, std::uint64_t seed);

/// Links checked for contact in this scenario.
std::vector<int> contact_links(const ScenarioSpec& spec, const AgentLayout& layout);

/// Runs one seed for the horizon, or until contact in contact mode.
RunLog run_scenario(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& opts = {});
RunLog run_scenario(const ScenarioSpec& spec, const ScenarioAssets& assets, std::uint64_t seed,
                    const RunOptions& opts = {});

/// Same columns for every mode: t, epsilon, q0.., w<link>.., qdot_norm, clamped, wall_ms.
void write_run_csv(const RunLog& log, std::ostream& out);
void write_run_csv(const RunLog& log, const std::string& path);

struct AggregateRow {
  long t = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  int count = 0;        // runs that reached step t
};

class BatchError : public std::runtime_error {
 public:
  BatchError(std::uint64_t seed, const std::string& what);
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

struct BatchResult {
  std::vector<RunLog> runs;  // in seed order
  std::vector<AggregateRow> aggregate;
};

/// Per-timestep mean and standard deviation of epsilon over the runs present
/// at each step. Independent of run order.
std::vector<AggregateRow> aggregate_epsilon(const std::vector<RunLog>& runs);

/// Runs seeds concurrently (threads <= 1: sequential); the first failure
/// aborts with a BatchError naming its seed.
BatchResult run_batch(const ScenarioSpec& spec, const std::vector<std::uint64_t>& seeds,
                      int threads = 1, const RunOptions& opts = {});

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path);
/// seed, steps, link; steps is the horizon and link -1 when no contact happened.
void write_contact_csv(const std::vector<RunLog>& runs, long horizon, std::ostream& out);
void write_contact_csv(const std::vector<RunLog>& runs, long horizon, const std::string& path);

/// Boustrophedon tip path through the domain box: layers along z, lanes along
/// x, lanes stepped along y so that no grid column is farther than half a
/// lane spacing from a lane.
std::vector<Point> search_pattern_waypoints(const GridDomain& domain, const PatternSpec& pattern);

/// Straight-line tracking of the waypoint path by the tip of the last link.
RunLog search_pattern_baseline(const ScenarioSpec& spec, const ScenarioAssets& assets,
                               std::uint64_t seed, const RunOptions& opts = {});

struct PhaseStats {
  double mean = 0.0, median = 0.0, p95 = 0.0;  // milliseconds
};

struct TimingReport {
  long steps = 0;
  PhaseStats total, coverage, diffusion, consensus;
};

PhaseStats phase_stats(std::vector<double> samplesMs);

/// Times `steps` control steps of the whole-body controller (after `warmup`).
TimingReport timing_report(const ScenarioSpec& spec, long steps, long warmup = 5,
                           std::uint64_t seed = 0);

}  // namespace wbe
