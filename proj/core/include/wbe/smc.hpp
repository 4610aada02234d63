#pragma once

#include <Eigen/Core>

#include "wbe/coverage.hpp"
#include "wbe/kinematics.hpp"

namespace wbe {

/// Cosine basis on an axis-aligned rectangle, orthonormal in L2:
///   phi_k(x) = prod_i cos(k_i pi (x_i - lo_i) / L_i) / h_k.
class FourierBasis {
 public:
  FourierBasis(int K, Eigen::Vector2d lower, Eigen::Vector2d upper);
  /// Basis over the cell-face box of a planar domain.
  static FourierBasis for_domain(const GridDomain& domain, int K);

  int K() const { return K_; }
  const Eigen::Vector2d& lower() const { return lower_; }
  const Eigen::Vector2d& upper() const { return upper_; }
  double h(int k1, int k2) const { return h_(k1, k2); }
  /// Sobolev weight (1 + |k|^2)^(-3/2).
  double lambda(int k1, int k2) const { return lambda_(k1, k2); }
  const Eigen::MatrixXd& lambdas() const { return lambda_; }

  double value(int k1, int k2, const Eigen::Vector2d& x) const;
  Eigen::Vector2d gradient(int k1, int k2, const Eigen::Vector2d& x) const;
  /// All K x K basis values at x.
  Eigen::MatrixXd values(const Eigen::Vector2d& x) const;

 private:
  int K_;
  Eigen::Vector2d lower_, upper_;
  Eigen::MatrixXd h_, lambda_;
};

/// p_k = integral of p phi_k by midpoint quadrature over the grid cells.
Eigen::MatrixXd target_coeffs(const ScalarField& p, const FourierBasis& basis);
Eigen::MatrixXd target_coeffs(const TargetDistribution& p, const FourierBasis& basis);

struct SmcState {
  Eigen::MatrixXd targetCoeffs;
  Eigen::MatrixXd trajectoryCoeffs;  // running integral of phi_k along the path
  double elapsed = 0.0;

  SmcState() = default;
  SmcState(const FourierBasis& basis, Eigen::MatrixXd target);
};

/// Ergodic gradient b = sum_k Lambda_k (c_k / t - p_k) grad phi_k(x).
Eigen::Vector2d smc_direction(const SmcState& state, const FourierBasis& basis,
                              const Eigen::Vector2d& x);

struct SmcStep {
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  // after integration and reflection
  double bNorm = 0.0;
};

/// Accumulates phi_k(x) dt, then returns -uMax b/|b| (zero when |b| < 1e-12)
/// and the point-integrator position reflected back into the basis box.
SmcStep smc_step(SmcState& state, const FourierBasis& basis, const Eigen::Vector2d& x, double dt,
                 double uMax);

/// Mirror a point into [lo, hi] per axis.
Eigen::Vector2d reflect_into(Eigen::Vector2d x, const Eigen::Vector2d& lo, const Eigen::Vector2d& hi);

/// SMC on the tip of a planar arm: the planar velocity command is mapped to
/// joint rates through the damped pseudoinverse of the tip's positional
/// Jacobian.
class SmcArmController {
 public:
  SmcArmController(const KinematicChain& chain, int link, Point tipLocal, FourierBasis basis,
                   Eigen::MatrixXd targetCoeffs, double uMax, double damping = 1e-4);

  /// Joint rate for the current configuration; advances the SMC state by dt.
  Eigen::VectorXd command(const JointConfig& q, double dt);

  const SmcState& state() const { return state_; }
  const FourierBasis& basis() const { return basis_; }

 private:
  const KinematicChain* chain_;
  int link_;
  Point tipLocal_;
  FourierBasis basis_;
  SmcState state_;
  double uMax_;
  double damping_;
};

}  // namespace wbe
