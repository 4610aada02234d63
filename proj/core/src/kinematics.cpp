#include "wbe/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace wbe {

KinematicChain::KinematicChain(int dims, Pose base, std::vector<RevoluteJoint> joints,
                               std::vector<LinkGeometry> links)
    : dims_(dims), base_(base), joints_(std::move(joints)), links_(std::move(links)) {
  if (dims_ != 2 && dims_ != 3) throw std::invalid_argument("KinematicChain: dims must be 2 or 3");
  if (joints_.empty()) throw std::invalid_argument("KinematicChain: needs at least one joint");
  if (joints_.size() != links_.size())
    throw std::invalid_argument("KinematicChain: one link geometry per joint required");
  for (RevoluteJoint& j : joints_) {
    if (!(j.lower < j.upper)) throw std::invalid_argument("KinematicChain: joint limits min >= max");
    const double n = j.axis.norm();
    if (!(n > 0.0)) throw std::invalid_argument("KinematicChain: zero joint axis");
    j.axis /= n;
    if (dims_ == 2) {
      const bool planar_axis = std::abs(std::abs(j.axis.z()) - 1.0) < 1e-12;
      const bool planar_offset = std::abs(j.offset.translation().z()) < 1e-12 &&
                                 std::abs(j.offset.linear()(2, 2) - 1.0) < 1e-12;
      if (!planar_axis || !planar_offset)
        throw std::invalid_argument("KinematicChain: planar chain must rotate about z in the xy plane");
    }
  }
  for (const LinkGeometry& l : links_) {
    if (!(l.volume > 0.0)) throw std::invalid_argument("KinematicChain: link volume must be > 0");
    if (dims_ == 3 && !(l.radius > 0.0))
      throw std::invalid_argument("KinematicChain: spatial links need a capsule radius > 0");
    if (l.radius < 0.0) throw std::invalid_argument("KinematicChain: negative link radius");
  }
}

Eigen::VectorXd KinematicChain::lower_limits() const {
  Eigen::VectorXd v(size());
  for (int j = 0; j < size(); ++j) v[j] = joints_[static_cast<std::size_t>(j)].lower;
  return v;
}

Eigen::VectorXd KinematicChain::upper_limits() const {
  Eigen::VectorXd v(size());
  for (int j = 0; j < size(); ++j) v[j] = joints_[static_cast<std::size_t>(j)].upper;
  return v;
}

LinkFrames forward_kinematics(const KinematicChain& chain, const JointConfig& q) {
  if (q.size() != chain.size())
    throw std::invalid_argument("forward_kinematics: configuration size mismatch");
  LinkFrames frames;
  frames.reserve(static_cast<std::size_t>(chain.size()));
  Pose t = chain.base();
  for (int j = 0; j < chain.size(); ++j) {
    const RevoluteJoint& joint = chain.joint(j);
    t = t * joint.offset * Eigen::AngleAxisd(q[j], joint.axis);
    frames.push_back(t);
  }
  return frames;
}

Point point_on_link(const LinkFrames& frames, int link, const Point& local) {
  if (link < 0 || link >= static_cast<int>(frames.size()))
    throw std::out_of_range("point_on_link: link index out of range");
  return frames[static_cast<std::size_t>(link)] * local;
}

Eigen::MatrixXd link_jacobian(const KinematicChain& chain, const LinkFrames& frames, int link,
                              const Point& local) {
  if (link < 0 || link >= chain.size())
    throw std::out_of_range("link_jacobian: link index out of range");
  const Point p = point_on_link(frames, link, local);
  const int n = chain.size();
  Eigen::MatrixXd spatial = Eigen::MatrixXd::Zero(6, n);
  for (int k = 0; k <= link; ++k) {
    const Pose& f = frames[static_cast<std::size_t>(k)];
    const Eigen::Vector3d z = f.linear() * chain.joint(k).axis;
    spatial.block<3, 1>(0, k) = z.cross(p - f.translation());
    spatial.block<3, 1>(3, k) = z;
  }
  if (chain.dims() == 3) return spatial;
  Eigen::MatrixXd planar(3, n);
  planar.row(0) = spatial.row(0);
  planar.row(1) = spatial.row(1);
  planar.row(2) = spatial.row(5);
  return planar;
}

Eigen::MatrixXd link_jacobian(const KinematicChain& chain, const JointConfig& q, int link,
                              const Point& local) {
  return link_jacobian(chain, forward_kinematics(chain, q), link, local);
}

double manipulability(const Eigen::MatrixXd& jacobian) {
  // Eigenvalues of J J^T are the squared singular values of J.
  const Eigen::MatrixXd jjt = jacobian * jacobian.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jjt, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  // Forming J J^T squares the conditioning; roundoff alone leaves ~1e-16 * lambda_max.
  if (lambda.minCoeff() < 1e-18 || lambda.minCoeff() <= 1e-12 * lambda.maxCoeff()) return 0.0;
  double det = 1.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) det *= lambda[i];
  return std::sqrt(det);
}

KinematicChain planar_chain(const std::vector<double>& lengths, const Point& base,
                            const std::vector<std::pair<double, double>>& limits) {
  if (lengths.size() != limits.size())
    throw std::invalid_argument("planar_chain: one limit pair per link required");
  std::vector<RevoluteJoint> joints;
  std::vector<LinkGeometry> links;
  double previous = 0.0;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    if (!(lengths[j] > 0.0)) throw std::invalid_argument("planar_chain: link length must be > 0");
    RevoluteJoint joint;
    joint.offset = Pose::Identity();
    joint.offset.translation() = Eigen::Vector3d(previous, 0.0, 0.0);
    joint.axis = Eigen::Vector3d::UnitZ();
    joint.lower = limits[j].first;
    joint.upper = limits[j].second;
    joints.push_back(joint);

    LinkGeometry link;
    link.p0 = Point::Zero();
    link.p1 = Point(lengths[j], 0.0, 0.0);
    link.radius = 0.0;
    link.volume = lengths[j];
    link.com = 0.5 * (link.p0 + link.p1);
    links.push_back(link);
    previous = lengths[j];
  }
  Pose b = Pose::Identity();
  b.translation() = Eigen::Vector3d(base.x(), base.y(), 0.0);
  return KinematicChain(2, b, std::move(joints), std::move(links));
}

KinematicChain planar_chain(int count, double length, const Point& base, double limit) {
  return planar_chain(std::vector<double>(static_cast<std::size_t>(count), length), base,
                      std::vector<std::pair<double, double>>(static_cast<std::size_t>(count),
                                                             {-limit, limit}));
}

namespace {

Eigen::Matrix3d rpy_rotation(double r, double p, double y) {
  return (Eigen::AngleAxisd(y, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(p, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(r, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

class LineReader {
 public:
  LineReader(const std::string& line, int number) : in_(line), number_(number) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("chain model line " + std::to_string(number_) + ": " + msg);
  }
  double number() {
    double v = 0.0;
    if (!(in_ >> v)) fail("expected a number");
    return v;
  }
  Eigen::Vector3d triple() {
    const double x = number();
    const double y = number();
    const double z = number();
    return {x, y, z};
  }
  bool word(std::string& out) { return static_cast<bool>(in_ >> out); }
  void expect(const std::string& keyword) {
    std::string w;
    if (!word(w) || w != keyword) fail("expected '" + keyword + "'");
  }

 private:
  std::istringstream in_;
  int number_;
};

}  // namespace

KinematicChain parse_chain_model(const std::string& text) {
  int dims = 3;
  Pose base = Pose::Identity();
  std::vector<RevoluteJoint> joints;
  std::vector<LinkGeometry> links;

  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    LineReader r(line, number);
    std::string kw;
    if (!r.word(kw)) continue;
    if (kw == "dims") {
      dims = static_cast<int>(r.number());
    } else if (kw == "base") {
      r.expect("xyz");
      const Eigen::Vector3d t = r.triple();
      r.expect("rpy");
      const Eigen::Vector3d rpy = r.triple();
      base = Pose::Identity();
      base.linear() = rpy_rotation(rpy.x(), rpy.y(), rpy.z());
      base.translation() = t;
    } else if (kw == "joint") {
      RevoluteJoint j;
      LinkGeometry l;
      bool haveCom = false;
      bool haveLink = false;
      std::string key;
      while (r.word(key)) {
        if (key == "xyz") {
          j.offset.translation() = r.triple();
        } else if (key == "rpy") {
          const Eigen::Vector3d rpy = r.triple();
          j.offset.linear() = rpy_rotation(rpy.x(), rpy.y(), rpy.z());
        } else if (key == "axis") {
          j.axis = r.triple();
        } else if (key == "limits") {
          j.lower = r.number();
          j.upper = r.number();
        } else if (key == "link") {
          l.p0 = r.triple();
          l.p1 = r.triple();
          haveLink = true;
        } else if (key == "radius") {
          l.radius = r.number();
        } else if (key == "volume") {
          l.volume = r.number();
        } else if (key == "com") {
          l.com = r.triple();
          haveCom = true;
        } else {
          r.fail("unknown joint field '" + key + "'");
        }
      }
      if (!haveLink) r.fail("joint without link geometry");
      if (!haveCom) l.com = 0.5 * (l.p0 + l.p1);
      joints.push_back(j);
      links.push_back(l);
    } else {
      r.fail("unknown keyword '" + kw + "'");
    }
  }
  return KinematicChain(dims, base, std::move(joints), std::move(links));
}

KinematicChain load_chain_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chain model " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_chain_model(buf.str());
}

namespace {

void put_triple(std::ostream& out, const Eigen::Vector3d& v) { out << v.x() << ' ' << v.y() << ' ' << v.z(); }

void put_pose(std::ostream& out, const Pose& p) {
  const Eigen::Vector3d ypr = p.linear().eulerAngles(2, 1, 0);
  out << "xyz ";
  put_triple(out, p.translation());
  out << " rpy ";
  put_triple(out, Eigen::Vector3d(ypr.z(), ypr.y(), ypr.x()));
}

}  // namespace

std::string format_chain_model(const KinematicChain& chain) {
  std::ostringstream out;
  out.precision(17);
  out << "dims " << chain.dims() << "\nbase ";
  put_pose(out, chain.base());
  out << '\n';
  for (int j = 0; j < chain.size(); ++j) {
    const RevoluteJoint& jt = chain.joint(j);
    const LinkGeometry& l = chain.link(j);
    out << "joint ";
    put_pose(out, jt.offset);
    out << " axis ";
    put_triple(out, jt.axis);
    out << " limits " << jt.lower << ' ' << jt.upper << " link ";
    put_triple(out, l.p0);
    out << ' ';
    put_triple(out, l.p1);
    out << " radius " << l.radius << " volume " << l.volume << " com ";
    put_triple(out, l.com);
    out << '\n';
  }
  return out.str();
}

void write_chain_model(const KinematicChain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write chain model " + path);
  out << format_chain_model(chain);
}

std::pair<Point, Point> link_segment_world(const KinematicChain& chain, const LinkFrames& frames,
                                           int link) {
  const LinkGeometry& g = chain.link(link);
  return {point_on_link(frames, link, g.p0), point_on_link(frames, link, g.p1)};
}

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

}  // namespace wbe
