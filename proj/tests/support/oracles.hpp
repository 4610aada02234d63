#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wbe/controller.hpp"
#include "wbe/diffusion.hpp"
#include "wbe/grid.hpp"
#include "wbe/kinematics.hpp"

namespace wbe::test {

inline std::string data_path(const std::string& rel) { return std::string(WBE_TEST_DATA_DIR) + "/" + rel; }
inline std::string scenario_path(const std::string& rel) {
  return std::string(WBE_TEST_SCENARIO_DIR) + "/" + rel;
}

double uniform(std::mt19937_64& rng, double lo, double hi);
ScalarField random_field(const GridDomain& d, std::mt19937_64& rng, double lo, double hi);

/// Sparse assembly of (I - alpha Lap) u = s with zero-flux boundaries, solved by SparseLU.
ScalarField direct_stationary(const ScalarField& s, const DiffusionParams& params);

/// Repeats diffuse_step at the CFL step until the max-norm change drops below tol.
ScalarField fixed_point_stationary(const ScalarField& s, const DiffusionParams& params, double tol);

/// Central finite differences of the attached point (rows 0..2) and, for
/// spatial chains, of the link rotation (angular rows).
Eigen::MatrixXd fd_jacobian(const KinematicChain& chain, const JointConfig& q, int link,
                            const Point& local, double eps);

/// Product of singular values.
double svd_manipulability(const Eigen::MatrixXd& J);

/// Minimizer of the weighted (optionally damped) least-squares cost via QR
/// of the stacked system, without forming normal equations.
Eigen::VectorXd qr_weighted_lsq(const Eigen::MatrixXd& J, const Eigen::VectorXd& w,
                                const Eigen::VectorXd& v, double damping = 0.0);

double weighted_cost(const Eigen::MatrixXd& J, const Eigen::VectorXd& w, const Eigen::VectorXd& v,
                     const Eigen::VectorXd& qdot);

/// Frames of the 7-joint arm composed directly from its modified-DH table.
std::vector<Eigen::Isometry3d> panda_dh_frames(const Eigen::VectorXd& q);

/// Uniform random configuration within the chain's limits.
JointConfig random_config(const KinematicChain& chain, std::mt19937_64& rng);

}  // namespace wbe::test
