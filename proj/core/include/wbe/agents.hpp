#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "wbe/grid.hpp"
#include "wbe/kinematics.hpp"

namespace wbe {

/// A point rigidly attached to a link. Active agents push the link, passive
/// ones only leave coverage.
struct VirtualAgent {
  int link = 0;
  Point local = Point::Zero();
  bool active = true;

  bool operator==(const VirtualAgent&) const = default;
};

class AgentLayout {
 public:
  AgentLayout() = default;
  /// Throws std::invalid_argument if a link has agents flagged active but none is.
  explicit AgentLayout(std::vector<VirtualAgent> agents);

  const std::vector<VirtualAgent>& agents() const { return agents_; }
  std::size_t size() const { return agents_.size(); }
  /// Links carrying at least one active agent, ascending.
  const std::set<int>& active_links() const { return activeLinks_; }
  /// Indices into agents() of the active agents on `link`.
  std::vector<std::size_t> active_on(int link) const;

  /// World positions of all agents (active and passive) at the given frames.
  std::vector<Point> positions(const LinkFrames& frames) const;

 private:
  std::vector<VirtualAgent> agents_;
  std::set<int> activeLinks_;
};

/// Agents along the link segment every `spacing`, both endpoints included.
/// A spacing longer than the link yields a single agent at the midpoint.
std::vector<VirtualAgent> sample_agents_equispaced(const KinematicChain& chain, int link,
                                                   double spacing, bool active = true);

/// Dart-throwing Poisson-disk sample on the link surface (capsule surface, or
/// the segment itself for planar links): pairwise distances >= radius, stops
/// after 30 consecutive rejected candidates. Deterministic for a given seed
/// on every platform.
std::vector<VirtualAgent> sample_agents_poisson(const KinematicChain& chain, int link,
                                                double radius, std::uint64_t seed,
                                                bool active = true);

/// Local weights: sampled potential values normalized to unit sum,
/// uniform when the sampled values sum below 1e-12.
std::vector<double> local_weights(const ScalarField& u, const std::vector<Point>& positions);

/// weight_i * grad u(x_i) per agent.
std::vector<Eigen::Vector3d> agent_forces(const ScalarField& u, const std::vector<Point>& positions,
                                          const std::vector<double>& weights);

struct LinkWrench {
  int link = 0;
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  /// Planar chains only use the z component.
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();
};

/// Net force and moment about `com` of forces applied at `positions`.
LinkWrench link_wrench(const std::vector<Eigen::Vector3d>& forces,
                       const std::vector<Point>& positions, const Point& com, int link = 0);

/// Link volume times the manipulability of its centre-of-mass Jacobian.
double link_weight(const KinematicChain& chain, const JointConfig& q, int link);
double link_weight(const KinematicChain& chain, const LinkFrames& frames, int link);

/// Scales to unit sum; uniform when every weight is below 1e-12 in total.
std::vector<double> normalize_link_weights(std::vector<double> weights);

/// CSV "link,x,y,z,active".
void write_layout_csv(const AgentLayout& layout, std::ostream& out);
void write_layout_csv(const AgentLayout& layout, const std::string& path);
AgentLayout read_layout_csv(std::istream& in);

}  // namespace wbe
