#include "wbe/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "wbe/metrics.hpp"

namespace wbe {

Eigen::VectorXd desired_twist(const LinkWrench& wrench, int dims) {
  if (dims == 2) return Eigen::Vector3d(wrench.force.x(), wrench.force.y(), wrench.moment.z());
  Eigen::VectorXd t(6);
  t << wrench.force, wrench.moment;
  return t;
}

WeightedSolve weighted_pinv_solve(const Eigen::MatrixXd& jacobian,
                                  const Eigen::VectorXd& rowWeights, const Eigen::VectorXd& twist,
                                  double damping) {
  if (jacobian.rows() != rowWeights.size() || jacobian.rows() != twist.size())
    throw std::invalid_argument("weighted_pinv_solve: inconsistent dimensions");
  if (damping < 0.0) throw std::invalid_argument("weighted_pinv_solve: negative damping");
  const Eigen::MatrixXd jtw = jacobian.transpose() * rowWeights.asDiagonal();
  const Eigen::MatrixXd normal = jtw * jacobian;
  const Eigen::VectorXd rhs = jtw * twist;
  const auto n = normal.rows();

  WeightedSolve out;
  out.damping = damping;
  if (damping == 0.0) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    const bool singular =
        ldlt.info() != Eigen::Success || d.size() == 0 || d.minCoeff() <= 1e-12 * std::max(d.maxCoeff(), 1e-300);
    if (!singular) {
      out.qdot = ldlt.solve(rhs);
      return out;
    }
    out.fellBack = true;
    out.damping = 1e-6;
  }
  const Eigen::MatrixXd damped = normal + out.damping * Eigen::MatrixXd::Identity(n, n);
  out.qdot = damped.ldlt().solve(rhs);
  return out;
}

JointConfig clamp_joints(const JointConfig& q, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper) {
  if (q.size() != lower.size() || q.size() != upper.size())
    throw std::invalid_argument("clamp_joints: size mismatch");
  return q.cwiseMax(lower).cwiseMin(upper);
}

JointConfig clamp_joints(const JointConfig& q, const KinematicChain& chain) {
  return clamp_joints(q, chain.lower_limits(), chain.upper_limits());
}

Eigen::VectorXd limit_speed(const Eigen::VectorXd& qdot, double maxSpeed) {
  const double peak = qdot.size() ? qdot.cwiseAbs().maxCoeff() : 0.0;
  if (peak <= maxSpeed || !(peak > 0.0)) return qdot;
  return qdot * (maxSpeed / peak);
}

void ControllerConfig::validate(const GridDomain& domain) const {
  if (!(dt > 0.0)) throw std::invalid_argument("ControllerConfig: dt must be > 0");
  if (!(maxJointSpeed > 0.0)) throw std::invalid_argument("ControllerConfig: maxJointSpeed must be > 0");
  if (damping < 0.0) throw std::invalid_argument("ControllerConfig: damping must be >= 0");
  if (!(twistGain > 0.0)) throw std::invalid_argument("ControllerConfig: twistGain must be > 0");
  diffusion.validate(domain);
}

ConsensusCommand consensus_command(const KinematicChain& chain, const LinkFrames& frames,
                                   const AgentLayout& layout, const ScalarField& u,
                                   double damping, double twistGain) {
  ConsensusCommand cmd;
  const int rows = chain.twist_rows();
  const int n = chain.size();
  const auto& active = layout.active_links();
  cmd.links.assign(active.begin(), active.end());
  const auto m = static_cast<Eigen::Index>(cmd.links.size());
  cmd.stackedTwists = Eigen::VectorXd::Zero(m * rows);
  cmd.stackedJacobian = Eigen::MatrixXd::Zero(m * rows, n);
  cmd.weightDiagonal = Eigen::VectorXd::Zero(m * rows);
  if (m == 0) {
    cmd.qdot = Eigen::VectorXd::Zero(n);
    cmd.damping = damping;
    return cmd;
  }

  std::vector<double> raw;
  raw.reserve(cmd.links.size());
  for (Eigen::Index b = 0; b < m; ++b) {
    const int link = cmd.links[static_cast<std::size_t>(b)];
    std::vector<Point> pos;
    for (std::size_t a : layout.active_on(link)) {
      const VirtualAgent& agent = layout.agents()[a];
      pos.push_back(point_on_link(frames, link, agent.local));
    }
    const std::vector<double> w = local_weights(u, pos);
    const std::vector<Eigen::Vector3d> f = agent_forces(u, pos, w);
    const LinkGeometry& g = chain.link(link);
    const Point com = point_on_link(frames, link, g.com);
    const LinkWrench wrench = link_wrench(f, pos, com, link);
    const Eigen::MatrixXd jac = link_jacobian(chain, frames, link, g.com);
    cmd.stackedTwists.segment(b * rows, rows) = twistGain * desired_twist(wrench, chain.dims());
    cmd.stackedJacobian.block(b * rows, 0, rows, n) = jac;
    raw.push_back(g.volume * manipulability(jac));
  }
  cmd.linkWeights = normalize_link_weights(raw);
  for (Eigen::Index b = 0; b < m; ++b)
    cmd.weightDiagonal.segment(b * rows, rows).setConstant(cmd.linkWeights[static_cast<std::size_t>(b)]);

  const WeightedSolve sol =
      weighted_pinv_solve(cmd.stackedJacobian, cmd.weightDiagonal, cmd.stackedTwists, damping);
  cmd.qdot = sol.qdot;
  cmd.damping = sol.damping;
  return cmd;
}

ConsensusCommand point_command(const KinematicChain& chain, const LinkFrames& frames,
                               const AgentLayout& layout, const ScalarField& u, double damping,
                               double twistGain) {
  ConsensusCommand cmd;
  const int rows = chain.dims();
  const int n = chain.size();
  const auto& active = layout.active_links();
  cmd.links.assign(active.begin(), active.end());

  std::vector<double> raw;
  std::vector<std::size_t> agents;
  std::vector<std::size_t> owner;  // entry of cmd.links per agent
  for (std::size_t b = 0; b < cmd.links.size(); ++b) {
    const int link = cmd.links[b];
    const Eigen::MatrixXd jac = link_jacobian(chain, frames, link, chain.link(link).com);
    raw.push_back(chain.link(link).volume * manipulability(jac));
    for (std::size_t a : layout.active_on(link)) {
      agents.push_back(a);
      owner.push_back(b);
    }
  }
  cmd.linkWeights = raw.empty() ? raw : normalize_link_weights(raw);

  const auto m = static_cast<Eigen::Index>(agents.size());
  cmd.stackedTwists = Eigen::VectorXd::Zero(m * rows);
  cmd.stackedJacobian = Eigen::MatrixXd::Zero(m * rows, n);
  cmd.weightDiagonal = Eigen::VectorXd::Zero(m * rows);
  for (Eigen::Index r = 0; r < m; ++r) {
    const VirtualAgent& agent = layout.agents()[agents[static_cast<std::size_t>(r)]];
    const Point x = point_on_link(frames, agent.link, agent.local);
    const Eigen::Vector3d g = sample_gradient(u, x);
    cmd.stackedTwists.segment(r * rows, rows) = twistGain * g.head(rows);
    cmd.stackedJacobian.block(r * rows, 0, rows, n) =
        link_jacobian(chain, frames, agent.link, agent.local).topRows(rows);
    cmd.weightDiagonal.segment(r * rows, rows).setConstant(cmd.linkWeights[owner[static_cast<std::size_t>(r)]]);
  }
  if (m == 0) {
    cmd.qdot = Eigen::VectorXd::Zero(n);
    cmd.damping = damping;
    return cmd;
  }
  const WeightedSolve sol =
      weighted_pinv_solve(cmd.stackedJacobian, cmd.weightDiagonal, cmd.stackedTwists, damping);
  cmd.qdot = sol.qdot;
  cmd.damping = sol.damping;
  return cmd;
}

WholeBodyExplorer::WholeBodyExplorer(KinematicChain chain, AgentLayout layout,
                                     TargetDistribution target, ControllerConfig config,
                                     JointConfig q0, double footprintRadius, OutOfBounds policy)
    : chain_(std::move(chain)),
      layout_(std::move(layout)),
      target_(std::move(target)),
      config_(config),
      q_(std::move(q0)),
      coverage_(target_.domain(), footprintRadius, policy),
      u_(target_.domain()),
      scratch_(target_.domain()),
      fieldDt_(0.0) {
  config_.validate(target_.domain());
  if (q_.size() != chain_.size()) throw std::invalid_argument("WholeBodyExplorer: q0 size mismatch");
  if (chain_.dims() != target_.domain().dims())
    throw std::invalid_argument("WholeBodyExplorer: chain and domain dimensions differ");
  for (const VirtualAgent& a : layout_.agents())
    if (a.link >= chain_.size()) throw std::invalid_argument("WholeBodyExplorer: agent on unknown link");
  fieldDt_ = cfl_timestep(config_.diffusion, target_.domain());
}

std::vector<Point> WholeBodyExplorer::agent_positions() const {
  return layout_.positions(forward_kinematics(chain_, q_));
}

StepDiagnostics WholeBodyExplorer::step() {
  using Clock = std::chrono::steady_clock;
  StepDiagnostics diag;
  diag.step = step_;

  const auto t0 = Clock::now();
  const LinkFrames frames = forward_kinematics(chain_, q_);
  const std::vector<Point> positions = layout_.positions(frames);
  diag.clamped = coverage_.deposit(positions);
  const ScalarField c = normalized_coverage(coverage_);
  const ResidualSource rs = residual_and_source(target_, c);
  diag.epsilon = ergodicity(target_, c);
  const auto tc = Clock::now();

  if (config_.fieldMode == FieldMode::NonStationary) {
    diffuse_in_place(u_, rs.source, config_.diffusion, fieldDt_, config_.diffusion.nSteps, scratch_);
  } else {
    StationaryResult sol = stationary_solve(rs.source, config_.diffusion, &u_);
    diag.fieldConverged = sol.converged;
    u_ = std::move(sol.field);
  }
  const auto t1 = Clock::now();

  command_ = config_.pointTasks
                 ? point_command(chain_, frames, layout_, u_, config_.damping, config_.twistGain)
                 : consensus_command(chain_, frames, layout_, u_, config_.damping, config_.twistGain);
  const Eigen::VectorXd qdot = limit_speed(command_.qdot, config_.maxJointSpeed);
  q_ = clamp_joints(q_ + qdot * config_.dt, chain_);
  const auto t2 = Clock::now();

  diag.linkWeights = command_.linkWeights;
  diag.qdotNorm = qdot.norm();
  diag.coverageSeconds = std::chrono::duration<double>(tc - t0).count();
  diag.diffusionSeconds = std::chrono::duration<double>(t1 - tc).count();
  diag.consensusSeconds = std::chrono::duration<double>(t2 - t1).count();
  ++step_;
  return diag;
}

}  // namespace wbe
