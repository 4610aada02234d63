#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "wbe/agents.hpp"
#include "wbe/coverage.hpp"
#include "wbe/diffusion.hpp"
#include "wbe/kinematics.hpp"

namespace wbe {

/// Identity-inertia map from a wrench to a link twist: (f; m), or
/// (fx, fy, mz) for planar chains.
Eigen::VectorXd desired_twist(const LinkWrench& wrench, int dims);

struct WeightedSolve {
  Eigen::VectorXd qdot;
  double damping = 0.0;
  /// True when lambda = 0 met a singular normal matrix and 1e-6 was used.
  bool fellBack = false;
};

/// Minimizer of (v - J qdot)^T W (v - J qdot) + lambda |qdot|^2 with W
/// diagonal (`rowWeights`), i.e. (J^T W J + lambda I) qdot = J^T W v.
WeightedSolve weighted_pinv_solve(const Eigen::MatrixXd& jacobian,
                                  const Eigen::VectorXd& rowWeights, const Eigen::VectorXd& twist,
                                  double damping);

/// Elementwise clamp of q into the chain's joint limits.
JointConfig clamp_joints(const JointConfig& q, const KinematicChain& chain);
JointConfig clamp_joints(const JointConfig& q, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper);

/// Uniformly rescales qdot so that its largest component is at most maxSpeed.
Eigen::VectorXd limit_speed(const Eigen::VectorXd& qdot, double maxSpeed);

/// Stacked task of the active links for one control step.
struct ConsensusCommand {
  std::vector<int> links;
  Eigen::VectorXd stackedTwists;
  Eigen::MatrixXd stackedJacobian;
  /// Diagonal of W: link weight w_j repeated over that link's twist rows.
  Eigen::VectorXd weightDiagonal;
  /// Normalized link weights, one per entry of `links`.
  std::vector<double> linkWeights;
  Eigen::VectorXd qdot;
  double damping = 0.0;
};

enum class FieldMode { NonStationary, Stationary };

struct ControllerConfig {
  double dt = 1.0;
  double maxJointSpeed = 1.0;
  double damping = 1e-6;
  /// Scale on the desired twists before the solve. Field values scale with
  /// the squared density, so grid units may need a large gain to reach the
  /// speed limit.
  double twistGain = 1.0;
  FieldMode fieldMode = FieldMode::NonStationary;
  /// Drive each active agent as a point (positional Jacobian rows only)
  /// instead of its link as a rigid body. With a single tip agent this is
  /// plain single-agent HEDAC on the end effector.
  bool pointTasks = false;
  DiffusionParams diffusion;

  void validate(const GridDomain& domain) const;
};

/// Builds the consensus command from the current potential field: local
/// weights, agent forces, link wrenches about the COM, identity-inertia
/// twists, normalized volume-manipulability link weights and the weighted
/// least-squares joint velocity.
ConsensusCommand consensus_command(const KinematicChain& chain, const LinkFrames& frames,
                                   const AgentLayout& layout, const ScalarField& u,
                                   double damping, double twistGain = 1.0);

/// Point-task variant: every active agent asks for velocity grad u at its
/// position (times twistGain); rows are the positional rows of its Jacobian,
/// weighted by its link's normalized weight.
ConsensusCommand point_command(const KinematicChain& chain, const LinkFrames& frames,
                               const AgentLayout& layout, const ScalarField& u, double damping,
                               double twistGain = 1.0);

struct StepDiagnostics {
  long step = 0;
  /// Ergodicity of the coverage after this step's deposit.
  double epsilon = 0.0;
  std::vector<double> linkWeights;
  double qdotNorm = 0.0;
  int clamped = 0;
  /// Non-converged stationary solve (iteration cap hit).
  bool fieldConverged = true;
  double coverageSeconds = 0.0;   // deposit, residual, source, metric
  double diffusionSeconds = 0.0;  // potential update
  double consensusSeconds = 0.0;  // kinematics, weights, solve, integration
};

/// Whole-body ergodic exploration state machine. Each step():
///   1. deposits coverage of every agent at q_t,
///   2. forms residual and squared-positive source,
///   3. updates the potential (nSteps explicit steps, or the stationary solve),
///   4. computes the consensus joint velocity of the active links,
///   5. integrates q, limits speed and clamps to the joint limits.
class WholeBodyExplorer {
 public:
  WholeBodyExplorer(KinematicChain chain, AgentLayout layout, TargetDistribution target,
                    ControllerConfig config, JointConfig q0, double footprintRadius,
                    OutOfBounds policy = OutOfBounds::Clamp);

  StepDiagnostics step();

  const JointConfig& q() const { return q_; }
  const KinematicChain& chain() const { return chain_; }
  const AgentLayout& layout() const { return layout_; }
  const ScalarField& potential() const { return u_; }
  const CoverageAccumulator& coverage() const { return coverage_; }
  const TargetDistribution& target() const { return target_; }
  const ConsensusCommand& last_command() const { return command_; }
  std::vector<Point> agent_positions() const;
  double dt_field() const { return fieldDt_; }
  long steps() const { return step_; }

 private:
  KinematicChain chain_;
  AgentLayout layout_;
  TargetDistribution target_;
  ControllerConfig config_;
  JointConfig q_;
  CoverageAccumulator coverage_;
  ScalarField u_;
  ScalarField scratch_;
  ConsensusCommand command_;
  double fieldDt_;
  long step_ = 0;
};

}  // namespace wbe
