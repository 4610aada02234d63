#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "wbe/grid.hpp"

namespace wbe {

using Pose = Eigen::Isometry3d;
using JointConfig = Eigen::VectorXd;

/// Body of one link in its own frame: a segment (planar arms) or a capsule
/// around the segment p0-p1.
struct LinkGeometry {
  Point p0 = Point::Zero();
  Point p1 = Point::Zero();
  double radius = 0.0;  // zero for planar segments
  double volume = 1.0;
  Point com = Point::Zero();

  double length() const { return (p1 - p0).norm(); }
  bool is_capsule() const { return radius > 0.0; }
};

struct RevoluteJoint {
  /// Fixed transform from the parent link frame to this joint's frame at q = 0.
  Pose offset = Pose::Identity();
  /// Rotation axis in the joint frame (unit length).
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double lower = -M_PI;
  double upper = M_PI;
};

/// Serial chain of revolute joints; link j is rigidly attached after joint j.
class KinematicChain {
 public:
  /// dims 2: every axis must be +-z and offsets must stay in the xy plane.
  /// Throws std::invalid_argument on inconsistent input.
  KinematicChain(int dims, Pose base, std::vector<RevoluteJoint> joints,
                 std::vector<LinkGeometry> links);

  int dims() const { return dims_; }
  int size() const { return static_cast<int>(joints_.size()); }
  const Pose& base() const { return base_; }
  const RevoluteJoint& joint(int j) const { return joints_.at(static_cast<std::size_t>(j)); }
  const LinkGeometry& link(int j) const { return links_.at(static_cast<std::size_t>(j)); }
  const std::vector<RevoluteJoint>& joints() const { return joints_; }
  const std::vector<LinkGeometry>& links() const { return links_; }
  /// Rows of a link twist: 3 (vx, vy, wz) for planar chains, 6 (v; w) otherwise.
  int twist_rows() const { return dims_ == 2 ? 3 : 6; }

  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;

 private:
  int dims_;
  Pose base_;
  std::vector<RevoluteJoint> joints_;
  std::vector<LinkGeometry> links_;
};

/// World poses of every link frame.
using LinkFrames = std::vector<Pose>;

LinkFrames forward_kinematics(const KinematicChain& chain, const JointConfig& q);

/// World position of a link-frame point. Throws std::out_of_range on a bad index.
Point point_on_link(const LinkFrames& frames, int link, const Point& local);

/// Geometric Jacobian of the point `local` on `link`: planar chains give
/// rows (vx, vy, wz), spatial chains (vx, vy, vz, wx, wy, wz). Columns of
/// joints after `link` are zero.
Eigen::MatrixXd link_jacobian(const KinematicChain& chain, const JointConfig& q, int link,
                              const Point& local);

/// Same, reusing already computed frames.
Eigen::MatrixXd link_jacobian(const KinematicChain& chain, const LinkFrames& frames, int link,
                              const Point& local);

/// sqrt(det(J J^T)); zero once the smallest singular value of J drops below
/// 1e-9, or below 1e-6 of the largest one.
double manipulability(const Eigen::MatrixXd& jacobian);

/// Planar arm with `count` links of `length` along the x axis of each link
/// frame; volume of each link equals its length (unit width).
KinematicChain planar_chain(int count, double length, const Point& base = Point::Zero(),
                            double limit = M_PI);
KinematicChain planar_chain(const std::vector<double>& lengths, const Point& base,
                            const std::vector<std::pair<double, double>>& limits);

/// Plain-text chain model. Line-oriented, '#' comments:
///
///   dims 3
///   base  xyz <x y z> rpy <r p y>
///   joint xyz <x y z> rpy <r p y> axis <x y z> limits <lo hi>
///         link <p0x p0y p0z> <p1x p1y p1z> radius <r> volume <v> [com <x y z>]
///
/// One `joint` line per joint (the link part on the same line). When `com`
/// is omitted it defaults to the segment midpoint.
KinematicChain load_chain_model(const std::string& path);
KinematicChain parse_chain_model(const std::string& text);
/// Model text that parse_chain_model reads back to the same chain.
std::string format_chain_model(const KinematicChain& chain);
void write_chain_model(const KinematicChain& chain, const std::string& path);

/// Segment endpoints of a link in world coordinates.
std::pair<Point, Point> link_segment_world(const KinematicChain& chain, const LinkFrames& frames,
                                           int link);

double point_segment_distance(const Point& x, const Point& a, const Point& b);

}  // namespace wbe
