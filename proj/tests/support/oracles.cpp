#include "oracles.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace wbe::test {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ScalarField random_field(const GridDomain& d, std::mt19937_64& rng, double lo, double hi) {
  ScalarField f(d);
  for (Index n = 0; n < f.size(); ++n) f[n] = uniform(rng, lo, hi);
  return f;
}

ScalarField direct_stationary(const ScalarField& s, const DiffusionParams& params) {
  const GridDomain& d = s.domain();
  const Index n = d.cell_count();
  std::vector<Eigen::Triplet<double>> trip;
  for (Index lin = 0; lin < n; ++lin) {
    const auto idx = d.unravel(lin);
    double diag = 1.0;
    for (int a = 0; a < d.dims(); ++a) {
      const double c = params.alpha[a] / (d.spacing(a) * d.spacing(a));
      for (int side : {-1, 1}) {
        auto nb = idx;
        nb[a] += side;
        if (nb[a] < 0 || nb[a] >= d.shape(a)) continue;  // zero flux through the face
        trip.emplace_back(lin, d.linear(nb[0], nb[1], nb[2]), -c);
        diag += c;
      }
    }
    trip.emplace_back(lin, lin, diag);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  const Eigen::Map<const Eigen::VectorXd> rhs(s.values().data(), n);
  const Eigen::VectorXd u = lu.solve(rhs);
  return ScalarField(d, std::vector<double>(u.data(), u.data() + n));
}

ScalarField fixed_point_stationary(const ScalarField& s, const DiffusionParams& params, double tol) {
  const double dt = cfl_timestep(params, s.domain());
  ScalarField u(s.domain());
  for (int it = 0; it < 10000000; ++it) {
    ScalarField next = diffuse_step(u, s, params, dt);
    const double change = max_abs_diff(next, u);
    u = std::move(next);
    if (change < tol) break;
  }
  return u;
}

Eigen::MatrixXd fd_jacobian(const KinematicChain& chain, const JointConfig& q, int link,
                            const Point& local, double eps) {
  const int rows = chain.twist_rows();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(rows, chain.size());
  for (int k = 0; k < chain.size(); ++k) {
    JointConfig qp = q, qm = q;
    qp[k] += eps;
    qm[k] -= eps;
    const LinkFrames fp = forward_kinematics(chain, qp);
    const LinkFrames fm = forward_kinematics(chain, qm);
    const Eigen::Vector3d dx = (fp[link] * local - fm[link] * local) / (2.0 * eps);
    // R(q+eps) R(q-eps)^T = exp(2 eps [w]x) to first order.
    const Eigen::Matrix3d dR = fp[link].linear() * fm[link].linear().transpose();
    const Eigen::Vector3d w =
        Eigen::Vector3d(dR(2, 1) - dR(1, 2), dR(0, 2) - dR(2, 0), dR(1, 0) - dR(0, 1)) / (4.0 * eps);
    if (chain.dims() == 2) {
      J.col(k) << dx.x(), dx.y(), w.z();
    } else {
      J.col(k) << dx, w;
    }
  }
  return J;
}

double svd_manipulability(const Eigen::MatrixXd& J) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  return svd.singularValues().prod();
}

Eigen::VectorXd qr_weighted_lsq(const Eigen::MatrixXd& J, const Eigen::VectorXd& w,
                                const Eigen::VectorXd& v, double damping) {
  // Stacked system [sqrt(W) J; sqrt(l) I] qdot = [sqrt(W) v; 0].
  const auto m = J.rows(), n = J.cols();
  const Eigen::VectorXd sw = w.cwiseSqrt();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + (damping > 0 ? n : 0), n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
  A.topRows(m) = sw.asDiagonal() * J;
  b.head(m) = sw.asDiagonal() * v;
  if (damping > 0) A.bottomRows(n) = std::sqrt(damping) * Eigen::MatrixXd::Identity(n, n);
  return A.colPivHouseholderQr().solve(b);
}

double weighted_cost(const Eigen::MatrixXd& J, const Eigen::VectorXd& w, const Eigen::VectorXd& v,
                     const Eigen::VectorXd& qdot) {
  const Eigen::VectorXd r = v - J * qdot;
  return r.dot(w.asDiagonal() * r);
}

std::vector<Eigen::Isometry3d> panda_dh_frames(const Eigen::VectorXd& q) {
  // a, d, alpha of each joint (modified DH, Craig convention).
  const double table[7][3] = {{0, 0.333, 0},          {0, 0, -M_PI / 2},     {0, 0.316, M_PI / 2},
                              {0.0825, 0, M_PI / 2},  {-0.0825, 0.384, -M_PI / 2},
                              {0, 0, M_PI / 2},       {0.088, 0, M_PI / 2}};
  std::vector<Eigen::Isometry3d> out;
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  for (int i = 0; i < 7; ++i) {
    Eigen::Isometry3d step = Eigen::Isometry3d::Identity();
    step.rotate(Eigen::AngleAxisd(table[i][2], Eigen::Vector3d::UnitX()));
    step.translate(Eigen::Vector3d(table[i][0], 0, 0));
    step.rotate(Eigen::AngleAxisd(q[i], Eigen::Vector3d::UnitZ()));
    step.translate(Eigen::Vector3d(0, 0, table[i][1]));
    T = T * step;
    out.push_back(T);
  }
  return out;
}

JointConfig random_config(const KinematicChain& chain, std::mt19937_64& rng) {
  JointConfig q(chain.size());
  for (int j = 0; j < chain.size(); ++j) q[j] = uniform(rng, chain.joint(j).lower, chain.joint(j).upper);
  return q;
}

}  // namespace wbe::test
