#include "wbe/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Geometry>

#include "wbe/field_io.hpp"
#include "wbe/metrics.hpp"
#include "wbe/smc.hpp"

namespace wbe {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Independent, portable streams per (seed, purpose).
std::mt19937_64 stream(std::uint64_t seed, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    purpose};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t kConfigStream = 1;
constexpr std::uint32_t kSphereStream = 2;

Point tip_of(const KinematicChain& chain, const LinkFrames& frames) {
  const int last = chain.size() - 1;
  return point_on_link(frames, last, chain.link(last).p1);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void snapshot(const RunOptions& opts, const ScenarioSpec& spec, std::uint64_t seed, long t,
              const ScalarField* u, const ScalarField& c) {
  if (opts.snapshotDir.empty() || spec.snapshotInterval <= 0 || t % spec.snapshotInterval != 0) return;
  std::filesystem::create_directories(opts.snapshotDir);
  const std::string stem =
      (std::filesystem::path(opts.snapshotDir) / (spec.name + "_s" + std::to_string(seed))).string();
  if (u) write_field_binary(*u, stem + "_u_" + std::to_string(t) + ".bin");
  write_field_binary(c, stem + "_c_" + std::to_string(t) + ".bin");
}

void finish(RunLog& log, const TargetDistribution& target, double totalMs) {
  if (!log.records.empty()) {
    log.finalEpsilon = log.records.back().epsilon;
    log.meanStepMs = totalMs / static_cast<double>(log.records.size());
  } else {
    log.finalEpsilon = ergodicity(target, ScalarField(target.domain()));
  }
}

}  // namespace

ContactResult contact_check(const KinematicChain& chain, const LinkFrames& frames,
                            const std::vector<int>& links, const Sphere& sphere) {
  ContactResult out;
  out.clearance = std::numeric_limits<double>::infinity();
  for (int link : links) {
    const auto [a, b] = link_segment_world(chain, frames, link);
    const double gap = point_segment_distance(sphere.center, a, b) - (chain.link(link).radius + sphere.radius);
    if (gap < out.clearance) {
      out.clearance = gap;
      if (gap <= 0.0) {
        out.contact = true;
        out.link = link;
      }
    }
  }
  return out;
}

ContactResult contact_check(const KinematicChain& chain, const JointConfig& q,
                            const std::vector<int>& links, const Sphere& sphere) {
  return contact_check(chain, forward_kinematics(chain, q), links, sphere);
}

std::vector<int> contact_links(const ScenarioSpec& spec, const AgentLayout& layout) {
  if (!spec.contact.links.empty()) return spec.contact.links;
  std::set<int> links;
  for (const VirtualAgent& a : layout.agents()) links.insert(a.link);
  return {links.begin(), links.end()};
}

Sphere sample_sphere(const ScenarioSpec& spec, const ScenarioAssets& assets, std::uint64_t seed) {
  const GridDomain& domain = assets.domain;
  const Point lo = spec.contact.centerLower.value_or(domain.lower_bound());
  const Point hi = spec.contact.centerUpper.value_or(domain.upper_bound());
  const std::vector<int> links = contact_links(spec, assets.layout);
  std::vector<LinkFrames> starts;
  for (const auto& c : spec.initial.configs)
    if (static_cast<int>(c.size()) == assets.chain.size())
      starts.push_back(forward_kinematics(assets.chain, Eigen::Map<const Eigen::VectorXd>(c.data(), c.size())));
  std::mt19937_64 rng = stream(seed, kSphereStream);
  Sphere s;
  s.radius = spec.contact.radius;
  for (int attempt = 0; attempt < spec.initial.maxAttempts; ++attempt) {
    for (int i = 0; i < domain.dims(); ++i) s.center[i] = lo[i] + uniform01(rng) * (hi[i] - lo[i]);
    const bool touching = std::any_of(starts.begin(), starts.end(), [&](const LinkFrames& f) {
      return contact_check(assets.chain, f, links, s).contact;
    });
    if (!touching) return s;
  }
  throw ScenarioError("contact", "every sphere placement touches a start configuration");
}

JointConfig initial_configuration(const ScenarioSpec& spec, const ScenarioAssets& assets,
                                  std::uint64_t seed, const std::optional<Sphere>& sphere) {
  const KinematicChain& chain = assets.chain;
  const int n = chain.size();
  if (!spec.initial.configs.empty()) {
    const std::size_t pick = spec.initial.configIndex >= 0 ? static_cast<std::size_t>(spec.initial.configIndex)
                                                           : seed % spec.initial.configs.size();
    const auto& c = spec.initial.configs[pick];
    if (static_cast<int>(c.size()) != n)
      throw ScenarioError("initial.configs", "expected " + std::to_string(n) + " joint values");
    return Eigen::Map<const Eigen::VectorXd>(c.data(), n);
  }
  const Eigen::VectorXd lo = chain.lower_limits();
  const Eigen::VectorXd hi = chain.upper_limits();
  const std::vector<int> links = contact_links(spec, assets.layout);
  std::mt19937_64 rng = stream(seed, kConfigStream);
  for (int attempt = 0; attempt < spec.initial.maxAttempts; ++attempt) {
    JointConfig q(n);
    for (int j = 0; j < n; ++j) q[j] = lo[j] + uniform01(rng) * (hi[j] - lo[j]);
    const LinkFrames frames = forward_kinematics(chain, q);
    if (spec.initial.requireTipInDomain && !assets.domain.contains(tip_of(chain, frames))) continue;
    if (sphere && contact_check(chain, frames, links, *sphere).contact) continue;
    return q;
  }
  throw ScenarioError("initial.maxAttempts", "no admissible initial configuration found");
}

RunLog run_scenario(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& opts) {
  return run_scenario(spec, build_assets(spec), seed, opts);
}

RunLog run_scenario(const ScenarioSpec& spec, const ScenarioAssets& assets, std::uint64_t seed,
                    const RunOptions& opts) {
  if (spec.mode == Mode::SearchPattern) return search_pattern_baseline(spec, assets, seed, opts);

  RunLog log;
  log.scenario = spec.name;
  log.mode = spec.mode;
  log.seed = seed;
  log.joints = assets.chain.size();
  if (spec.contact.enabled) log.sphere = sample_sphere(spec, assets, seed);
  const std::vector<int> checkLinks = contact_links(spec, assets.layout);
  JointConfig q = initial_configuration(spec, assets, seed, log.sphere);
  double totalMs = 0.0;

  auto touched = [&](const JointConfig& qt, long t) {
    if (!log.sphere) return false;
    const ContactResult hit = contact_check(assets.chain, qt, checkLinks, *log.sphere);
    if (!hit.contact) return false;
    log.stepsToContact = t;
    log.contactLink = hit.link;
    return true;
  };

  if (spec.mode == Mode::Smc) {
    const int last = assets.chain.size() - 1;
    const FourierBasis basis = FourierBasis::for_domain(assets.domain, spec.smc.basis);
    SmcArmController smc(assets.chain, last, assets.chain.link(last).p1, basis,
                         target_coeffs(assets.target, basis), spec.smc.uMax, spec.smc.damping);
    CoverageAccumulator cov(assets.domain, spec.footprintRadius, spec.outOfBounds);
    for (long t = 0; t < spec.horizon; ++t) {
      if (touched(q, t)) break;
      const auto t0 = Clock::now();
      RunRecord rec;
      rec.t = t;
      rec.q = to_std(q);
      const LinkFrames frames = forward_kinematics(assets.chain, q);
      rec.clamped = cov.deposit(assets.layout.positions(frames));
      const ScalarField c = normalized_coverage(cov);
      rec.epsilon = ergodicity(assets.target, c);
      const Eigen::VectorXd qdot = limit_speed(smc.command(q, spec.controller.dt), spec.controller.maxJointSpeed);
      q = clamp_joints(q + qdot * spec.controller.dt, assets.chain);
      rec.qdotNorm = qdot.norm();
      const double ms = ms_since(t0);
      totalMs += ms;
      rec.wallMs = opts.deterministic ? 0.0 : ms;
      snapshot(opts, spec, seed, t, nullptr, c);
      log.records.push_back(std::move(rec));
    }
    finish(log, assets.target, totalMs);
    return log;
  }

  ControllerConfig cfg = spec.controller;
  cfg.fieldMode = spec.mode == Mode::HedacNonStationary ? FieldMode::NonStationary : FieldMode::Stationary;
  cfg.pointTasks = spec.mode == Mode::Passive;
  WholeBodyExplorer explorer(assets.chain, assets.layout, assets.target, cfg, q, spec.footprintRadius,
                             spec.outOfBounds);
  const auto& active = assets.layout.active_links();
  log.weightLinks.assign(active.begin(), active.end());
  bool warnedField = false;
  for (long t = 0; t < spec.horizon; ++t) {
    if (touched(explorer.q(), t)) break;
    const auto t0 = Clock::now();
    RunRecord rec;
    rec.t = t;
    rec.q = to_std(explorer.q());
    const StepDiagnostics d = explorer.step();
    rec.epsilon = d.epsilon;
    rec.linkWeights = d.linkWeights;
    rec.qdotNorm = d.qdotNorm;
    rec.clamped = d.clamped;
    const double ms = ms_since(t0);
    totalMs += ms;
    rec.wallMs = opts.deterministic ? 0.0 : ms;
    if (!d.fieldConverged && !warnedField) {
      log.warnings.push_back("stationary solve hit the iteration cap at step " + std::to_string(t));
      warnedField = true;
    }
    if (!opts.snapshotDir.empty() && spec.snapshotInterval > 0 && t % spec.snapshotInterval == 0)
      snapshot(opts, spec, seed, t, &explorer.potential(), normalized_coverage(explorer.coverage()));
    log.records.push_back(std::move(rec));
  }
  finish(log, assets.target, totalMs);
  return log;
}

void write_run_csv(const RunLog& log, std::ostream& out) {
  out << "t,epsilon";
  for (int j = 0; j < log.joints; ++j) out << ",q" << j;
  for (int l : log.weightLinks) out << ",w" << l;
  out << ",qdot_norm,clamped,wall_ms\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const RunRecord& r : log.records) {
    out << r.t << ',' << r.epsilon;
    for (double v : r.q) out << ',' << v;
    for (std::size_t k = 0; k < log.weightLinks.size(); ++k)
      out << ',' << (k < r.linkWeights.size() ? r.linkWeights[k] : 0.0);
    out << ',' << r.qdotNorm << ',' << r.clamped << ',' << r.wallMs << '\n';
  }
}

void write_run_csv(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_run_csv(log, out);
}

BatchError::BatchError(std::uint64_t seed, const std::string& what)
    : std::runtime_error("seed " + std::to_string(seed) + ": " + what), seed_(seed) {}

std::vector<AggregateRow> aggregate_epsilon(const std::vector<RunLog>& runs) {
  std::size_t longest = 0;
  for (const RunLog& r : runs) longest = std::max(longest, r.records.size());
  std::vector<AggregateRow> rows;
  rows.reserve(longest);
  std::vector<double> vals;
  for (std::size_t t = 0; t < longest; ++t) {
    vals.clear();
    for (const RunLog& r : runs)
      if (t < r.records.size()) vals.push_back(r.records[t].epsilon);
    // Sorting makes the floating-point sums independent of run order.
    std::sort(vals.begin(), vals.end());
    double sum = 0.0;
    for (double v : vals) sum += v;
    const double mean = sum / static_cast<double>(vals.size());
    double sq = 0.0;
    for (double v : vals) sq += (v - mean) * (v - mean);
    rows.push_back({static_cast<long>(t), mean, std::sqrt(sq / static_cast<double>(vals.size())),
                    static_cast<int>(vals.size())});
  }
  return rows;
}

BatchResult run_batch(const ScenarioSpec& spec, const std::vector<std::uint64_t>& seeds, int threads,
                      const RunOptions& opts) {
  if (seeds.empty()) throw std::invalid_argument("run_batch: no seeds");
  const ScenarioAssets assets = build_assets(spec);
  BatchResult out;
  out.runs.resize(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < seeds.size();) {
      if (failed) return;
      try {
        out.runs[k] = run_scenario(spec, assets, seeds[k], opts);
      } catch (...) {
        errors[k] = std::current_exception();
        failed = true;
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(seeds.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      throw BatchError(seeds[k], e.what());
    }
  }
  out.aggregate = aggregate_epsilon(out.runs);
  return out;
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
  out << "t,mean_epsilon,std_epsilon\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const AggregateRow& r : rows) out << r.t << ',' << r.mean << ',' << r.stddev << '\n';
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_aggregate_csv(rows, out);
}

void write_contact_csv(const std::vector<RunLog>& runs, long horizon, std::ostream& out) {
  out << "seed,steps,link\n";
  for (const RunLog& r : runs)
    out << r.seed << ',' << r.stepsToContact.value_or(horizon) << ',' << (r.stepsToContact ? r.contactLink : -1)
        << '\n';
}

void write_contact_csv(const std::vector<RunLog>& runs, long horizon, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_contact_csv(runs, horizon, out);
}

std::vector<Point> search_pattern_waypoints(const GridDomain& domain, const PatternSpec& pattern) {
  if (domain.dims() != 3) throw std::invalid_argument("search_pattern_waypoints: spatial domain required");
  const auto& n = domain.shape();
  const Point first = domain.cell_center(0, 0, 0);
  const Point last = domain.cell_center(n[0] - 1, n[1] - 1, n[2] - 1);
  auto stations = [](double a, double b, double spacing) {
    const double span = b - a;
    const int count = std::max(1, static_cast<int>(std::ceil(span / spacing - 1e-9)));
    std::vector<double> s;
    for (int k = 0; k < count; ++k) s.push_back(a + (k + 0.5) * span / count);
    return s;
  };
  const std::vector<double> lanes = stations(first.y(), last.y(), pattern.laneSpacing);
  const std::vector<double> layers = stations(first.z(), last.z(), pattern.layerSpacing);

  std::vector<Point> path;
  bool forwardX = true;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    // Snake across y, alternating direction per layer so layers join up.
    std::vector<double> ys = lanes;
    if (l % 2 == 1) std::reverse(ys.begin(), ys.end());
    for (double y : ys) {
      const double x0 = forwardX ? first.x() : last.x();
      const double x1 = forwardX ? last.x() : first.x();
      path.emplace_back(x0, y, layers[l]);
      path.emplace_back(x1, y, layers[l]);
      forwardX = !forwardX;
    }
  }
  if (pattern.reverse) std::reverse(path.begin(), path.end());
  return path;
}

RunLog search_pattern_baseline(const ScenarioSpec& spec, const ScenarioAssets& assets,
                               std::uint64_t seed, const RunOptions& opts) {
  const KinematicChain& chain = assets.chain;
  if (chain.dims() != 3) throw ScenarioError("mode", "search-pattern needs a spatial chain");
  RunLog log;
  log.scenario = spec.name;
  log.mode = spec.mode;
  log.seed = seed;
  log.joints = chain.size();
  if (spec.contact.enabled) log.sphere = sample_sphere(spec, assets, seed);
  const std::vector<int> checkLinks = contact_links(spec, assets.layout);
  JointConfig q = initial_configuration(spec, assets, seed, log.sphere);

  const int last = chain.size() - 1;
  const Point tipLocal = chain.link(last).p1;
  const std::vector<Point> waypoints = search_pattern_waypoints(assets.domain, spec.pattern);
  const Eigen::Matrix3d holdR = forward_kinematics(chain, q)[static_cast<std::size_t>(last)].linear();
  CoverageAccumulator cov(assets.domain, spec.footprintRadius, spec.outOfBounds);

  // Tracked point moves along the polyline from the start tip position.
  std::size_t leg = 0;  // heading for waypoints[leg]
  Point carrot = tip_of(chain, forward_kinematics(chain, q));
  int stalled = 0;
  double totalMs = 0.0;
  const double dt = spec.controller.dt;

  for (long t = 0; t < spec.horizon; ++t) {
    const LinkFrames frames = forward_kinematics(chain, q);
    if (log.sphere) {
      const ContactResult hit = contact_check(chain, frames, checkLinks, *log.sphere);
      if (hit.contact) {
        log.stepsToContact = t;
        log.contactLink = hit.link;
        break;
      }
    }
    const auto t0 = Clock::now();
    RunRecord rec;
    rec.t = t;
    rec.q = to_std(q);
    rec.clamped = cov.deposit(assets.layout.positions(frames));
    const ScalarField c = normalized_coverage(cov);
    rec.epsilon = ergodicity(assets.target, c);

    const Point tip = point_on_link(frames, last, tipLocal);
    if (leg < waypoints.size()) {
      if ((tip - carrot).norm() <= spec.pattern.tolerance) {
        stalled = 0;
        double budget = spec.pattern.pathSpeed;
        while (budget > 0.0 && leg < waypoints.size()) {
          const Point d = waypoints[leg] - carrot;
          const double len = d.norm();
          if (len <= budget) {
            carrot = waypoints[leg];
            budget -= len;
            ++leg;
          } else {
            carrot += d * (budget / len);
            budget = 0.0;
          }
        }
      } else if (++stalled > spec.pattern.patience) {
        log.warnings.push_back("waypoint " + std::to_string(leg) + " unreachable at step " + std::to_string(t) +
                               ", skipped");
        stalled = 0;
        carrot = waypoints[leg];
        ++leg;
      }
    }
    Eigen::VectorXd twist(6);
    const Eigen::Matrix3d R = frames[static_cast<std::size_t>(last)].linear();
    const Eigen::AngleAxisd err(holdR * R.transpose());
    twist << (carrot - tip) / dt, spec.pattern.orientationGain * err.angle() * err.axis() / dt;
    const Eigen::MatrixXd J = link_jacobian(chain, frames, last, tipLocal);
    const Eigen::VectorXd qdot = limit_speed(
        weighted_pinv_solve(J, Eigen::VectorXd::Ones(6), twist, spec.pattern.damping).qdot,
        spec.controller.maxJointSpeed);
    q = clamp_joints(q + qdot * dt, chain);
    rec.qdotNorm = qdot.norm();
    const double ms = ms_since(t0);
    totalMs += ms;
    rec.wallMs = opts.deterministic ? 0.0 : ms;
    snapshot(opts, spec, seed, t, nullptr, c);
    log.records.push_back(std::move(rec));
  }
  finish(log, assets.target, totalMs);
  return log;
}

PhaseStats phase_stats(std::vector<double> samplesMs) {
  PhaseStats s;
  if (samplesMs.empty()) return s;
  std::sort(samplesMs.begin(), samplesMs.end());
  double sum = 0.0;
  for (double v : samplesMs) sum += v;
  const std::size_t n = samplesMs.size();
  s.mean = sum / static_cast<double>(n);
  s.median = n % 2 ? samplesMs[n / 2] : 0.5 * (samplesMs[n / 2 - 1] + samplesMs[n / 2]);
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = samplesMs[std::min(n - 1, rank == 0 ? 0 : rank - 1)];
  return s;
}

TimingReport timing_report(const ScenarioSpec& spec, long steps, long warmup, std::uint64_t seed) {
  if (spec.mode != Mode::HedacNonStationary && spec.mode != Mode::HedacStationary && spec.mode != Mode::Passive)
    throw ScenarioError("mode", "timing needs a whole-body controller mode");
  if (steps < 1) throw std::invalid_argument("timing_report: steps must be >= 1");
  const ScenarioAssets assets = build_assets(spec);
  ControllerConfig cfg = spec.controller;
  cfg.fieldMode = spec.mode == Mode::HedacNonStationary ? FieldMode::NonStationary : FieldMode::Stationary;
  cfg.pointTasks = spec.mode == Mode::Passive;
  const JointConfig q0 = initial_configuration(spec, assets, seed, std::nullopt);
  WholeBodyExplorer explorer(assets.chain, assets.layout, assets.target, cfg, q0, spec.footprintRadius,
                             spec.outOfBounds);
  for (long k = 0; k < warmup; ++k) explorer.step();
  std::vector<double> total, coverage, diffusion, consensus;
  for (long k = 0; k < steps; ++k) {
    const auto t0 = Clock::now();
    const StepDiagnostics d = explorer.step();
    total.push_back(ms_since(t0));
    coverage.push_back(1e3 * d.coverageSeconds);
    diffusion.push_back(1e3 * d.diffusionSeconds);
    consensus.push_back(1e3 * d.consensusSeconds);
  }
  TimingReport r;
  r.steps = steps;
  r.total = phase_stats(total);
  r.coverage = phase_stats(coverage);
  r.diffusion = phase_stats(diffusion);
  r.consensus = phase_stats(consensus);
  return r;
}

}  // namespace wbe
