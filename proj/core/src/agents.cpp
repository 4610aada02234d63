#include "wbe/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wbe {

AgentLayout::AgentLayout(std::vector<VirtualAgent> agents) : agents_(std::move(agents)) {
  for (const VirtualAgent& a : agents_) {
    if (a.link < 0) throw std::invalid_argument("AgentLayout: negative link index");
    if (!a.local.allFinite()) throw std::invalid_argument("AgentLayout: non-finite agent position");
    if (a.active) activeLinks_.insert(a.link);
  }
}

std::vector<std::size_t> AgentLayout::active_on(int link) const {
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < agents_.size(); ++n)
    if (agents_[n].active && agents_[n].link == link) idx.push_back(n);
  return idx;
}

std::vector<Point> AgentLayout::positions(const LinkFrames& frames) const {
  std::vector<Point> out;
  out.reserve(agents_.size());
  for (const VirtualAgent& a : agents_) out.push_back(point_on_link(frames, a.link, a.local));
  return out;
}

std::vector<VirtualAgent> sample_agents_equispaced(const KinematicChain& chain, int link,
                                                   double spacing, bool active) {
  if (!(spacing > 0.0)) throw std::invalid_argument("sample_agents_equispaced: spacing must be > 0");
  const LinkGeometry& g = chain.link(link);
  const double len = g.length();
  std::vector<VirtualAgent> out;
  if (spacing > len) {
    out.push_back({link, 0.5 * (g.p0 + g.p1), active});
    return out;
  }
  // Round so that a spacing dividing the length exactly lands on the far end.
  const auto intervals = static_cast<int>(std::floor(len / spacing + 1e-9));
  for (int k = 0; k <= intervals; ++k) {
    const double t = std::min(1.0, k * spacing / len);
    out.push_back({link, g.p0 + t * (g.p1 - g.p0), active});
  }
  return out;
}

namespace {

// Portable uniform [0, 1) from the standardized mt19937_64 sequence.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Orthonormal pair perpendicular to a unit axis.
std::pair<Eigen::Vector3d, Eigen::Vector3d> perpendicular_basis(const Eigen::Vector3d& axis) {
  const Eigen::Vector3d helper =
      std::abs(axis.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = axis.cross(helper).normalized();
  return {e1, axis.cross(e1)};
}

Point capsule_surface_point(const LinkGeometry& g, std::mt19937_64& rng) {
  const double r = g.radius;
  const double len = g.length();
  const Eigen::Vector3d axis =
      len > 0.0 ? Eigen::Vector3d((g.p1 - g.p0) / len) : Eigen::Vector3d::UnitZ();
  const auto [e1, e2] = perpendicular_basis(axis);
  const double cylinder = 2.0 * M_PI * r * len;
  const double caps = 4.0 * M_PI * r * r;
  const double pick = uniform01(rng) * (cylinder + caps);
  if (pick < cylinder) {
    const double t = uniform01(rng);
    const double phi = 2.0 * M_PI * uniform01(rng);
    return g.p0 + t * len * axis + r * (std::cos(phi) * e1 + std::sin(phi) * e2);
  }
  // Uniform direction on the sphere; the sign along the axis picks the cap.
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * M_PI * uniform01(rng);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const Eigen::Vector3d dir = z * axis + rho * (std::cos(phi) * e1 + std::sin(phi) * e2);
  return (z >= 0.0 ? g.p1 : g.p0) + r * dir;
}

}  // namespace

std::vector<VirtualAgent> sample_agents_poisson(const KinematicChain& chain, int link,
                                                double radius, std::uint64_t seed, bool active) {
  if (!(radius > 0.0)) throw std::invalid_argument("sample_agents_poisson: radius must be > 0");
  const LinkGeometry& g = chain.link(link);
  std::mt19937_64 rng(seed);
  constexpr int kAttempts = 30;

  std::vector<Point> accepted;
  int failures = 0;
  while (failures < kAttempts) {
    const Point candidate =
        g.is_capsule() ? capsule_surface_point(g, rng) : Point(g.p0 + uniform01(rng) * (g.p1 - g.p0));
    const bool ok = std::all_of(accepted.begin(), accepted.end(), [&](const Point& p) {
      return (p - candidate).norm() >= radius;
    });
    if (ok) {
      accepted.push_back(candidate);
      failures = 0;
    } else {
      ++failures;
    }
  }
  std::vector<VirtualAgent> out;
  out.reserve(accepted.size());
  for (const Point& p : accepted) out.push_back({link, p, active});
  return out;
}

std::vector<double> local_weights(const ScalarField& u, const std::vector<Point>& positions) {
  if (positions.empty()) throw std::invalid_argument("local_weights: no positions");
  std::vector<double> w(positions.size());
  double total = 0.0;
  for (std::size_t n = 0; n < positions.size(); ++n) {
    // Potential is non-negative; guard against round-off below zero.
    w[n] = std::max(0.0, sample_value(u, positions[n]));
    total += w[n];
  }
  if (total < 1e-12) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<Eigen::Vector3d> agent_forces(const ScalarField& u, const std::vector<Point>& positions,
                                          const std::vector<double>& weights) {
  if (positions.size() != weights.size())
    throw std::invalid_argument("agent_forces: positions and weights differ in length");
  std::vector<Eigen::Vector3d> f;
  f.reserve(positions.size());
  for (std::size_t n = 0; n < positions.size(); ++n)
    f.push_back(weights[n] * sample_gradient(u, positions[n]));
  return f;
}

LinkWrench link_wrench(const std::vector<Eigen::Vector3d>& forces,
                       const std::vector<Point>& positions, const Point& com, int link) {
  if (forces.size() != positions.size())
    throw std::invalid_argument("link_wrench: forces and positions differ in length");
  LinkWrench w;
  w.link = link;
  for (std::size_t n = 0; n < forces.size(); ++n) {
    w.force += forces[n];
    w.moment += (positions[n] - com).cross(forces[n]);
  }
  return w;
}

double link_weight(const KinematicChain& chain, const LinkFrames& frames, int link) {
  const LinkGeometry& g = chain.link(link);
  return g.volume * manipulability(link_jacobian(chain, frames, link, g.com));
}

double link_weight(const KinematicChain& chain, const JointConfig& q, int link) {
  return link_weight(chain, forward_kinematics(chain, q), link);
}

std::vector<double> normalize_link_weights(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) total += std::max(0.0, w);
  if (weights.empty()) return weights;
  if (total < 1e-12) {
    std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(weights.size()));
    return weights;
  }
  for (double& w : weights) w = std::max(0.0, w) / total;
  return weights;
}

void write_layout_csv(const AgentLayout& layout, std::ostream& out) {
  out << "link,x,y,z,active\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const VirtualAgent& a : layout.agents())
    out << a.link << ',' << a.local.x() << ',' << a.local.y() << ',' << a.local.z() << ','
        << (a.active ? 1 : 0) << '\n';
}

void write_layout_csv(const AgentLayout& layout, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_layout_csv(layout, out);
}

AgentLayout read_layout_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("link,", 0) != 0)
    throw std::runtime_error("read_layout_csv: missing header");
  std::vector<VirtualAgent> agents;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    VirtualAgent a;
    int active = 0;
    if (!(row >> a.link >> a.local.x() >> a.local.y() >> a.local.z() >> active))
      throw std::runtime_error("read_layout_csv: malformed row");
    a.active = active != 0;
    agents.push_back(a);
  }
  return AgentLayout(std::move(agents));
}

}  // namespace wbe
