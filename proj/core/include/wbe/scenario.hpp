#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbe/agents.hpp"
#include "wbe/controller.hpp"
#include "wbe/coverage.hpp"
#include "wbe/kinematics.hpp"
#include "wbe/targets.hpp"

namespace wbe {

/// Invalid scenario; field() is the dotted path of the offending entry.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Mode { HedacNonStationary, HedacStationary, Smc, Passive, SearchPattern };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct DomainSpec {
  int dims = 2;
  std::array<Index, 3> shape{75, 75, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  GridDomain build() const { return GridDomain(dims, shape, spacing, origin); }
};

struct TargetSpec {
  std::string image;  // PGM path; empty when primitives are used
  std::vector<TargetPrimitive> primitives;  // empty and no image: uniform
};

struct ChainSpec {
  std::string model;  // model file; empty selects the planar arm below
  int planarLinks = 5;
  double planarLength = 1.0;
  Point planarBase = Point(37.0, 37.0, 0.0);
  double planarLimit = M_PI;
};

struct AgentSpec {
  enum class Method { Equispaced, Poisson, Points };
  int link = 0;
  Method method = Method::Equispaced;
  double spacing = 1.0;   // equispaced
  double radius = 0.03;   // poisson
  std::uint64_t seed = 1;  // poisson
  std::vector<Point> points;  // explicit link-frame points
  bool active = true;
};

struct InitialSpec {
  /// Explicit configurations; run `seed` uses configs[seed % size].
  std::vector<std::vector<double>> configs;
  /// Fixed entry of `configs` for every seed; -1 cycles by seed.
  int configIndex = -1;
  /// Otherwise uniform per joint within limits, redrawn until the tip of the
  /// last link lies inside the domain (when set).
  bool requireTipInDomain = true;
  int maxAttempts = 100000;
};

struct SmcSpec {
  int basis = 20;
  double uMax = 1.0;
  double damping = 1e-4;
};

struct ContactSpec {
  bool enabled = false;
  double radius = 0.033;
  /// Sphere centres are drawn uniformly from this box; empty box -> domain.
  std::optional<Point> centerLower, centerUpper;
  /// Links checked for contact; empty -> every link carrying agents.
  std::vector<int> links;
};

struct PatternSpec {
  double laneSpacing = 0.08;
  double layerSpacing = 0.2;
  /// Distance the tracked point advances along the path per step.
  double pathSpeed = 0.01;
  /// Waypoint considered reached within this tip distance.
  double tolerance = 0.01;
  /// Steps spent on a waypoint before it is declared unreachable.
  int patience = 200;
  double damping = 1e-4;
  double orientationGain = 1.0;
  /// false: bottom layer first (pose 1 to pose 2); true: reversed.
  bool reverse = false;
};

struct ScenarioSpec {
  std::string name = "scenario";
  std::string baseDir = ".";  // relative paths resolve against this
  Mode mode = Mode::HedacNonStationary;
  long horizon = 1000;
  std::uint64_t firstSeed = 0;
  int seedCount = 1;

  DomainSpec domain;
  TargetSpec target;
  ChainSpec chain;
  std::vector<AgentSpec> agents;
  /// When present, agents on links outside this set are made passive.
  std::optional<std::vector<int>> activeLinks;
  ControllerConfig controller;
  double footprintRadius = 1.0;
  OutOfBounds outOfBounds = OutOfBounds::Clamp;
  InitialSpec initial;
  SmcSpec smc;
  ContactSpec contact;
  PatternSpec pattern;
  long snapshotInterval = 0;  // 0 disables field snapshots

  std::vector<std::uint64_t> seeds() const;
  /// Throws ScenarioError naming the first bad field.
  void validate() const;
  std::string resolve(const std::string& path) const;
};

/// Built-in defaults as a JSON document (the outermost layer of merging).
std::string default_scenario_json();

/// Parses a scenario document. Layers, later wins: built-in defaults, the
/// document's "defaults" object, the document itself.
ScenarioSpec parse_scenario(const std::string& text, const std::string& baseDir = ".");
ScenarioSpec load_scenario(const std::string& path);

/// Objects built from a spec, shared by all seeds of a batch.
struct ScenarioAssets {
  GridDomain domain;
  TargetDistribution target;
  KinematicChain chain;
  AgentLayout layout;
};

ScenarioAssets build_assets(const ScenarioSpec& spec);

}  // namespace wbe
