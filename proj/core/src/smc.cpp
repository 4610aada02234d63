#include "wbe/smc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "wbe/controller.hpp"

namespace wbe {

FourierBasis::FourierBasis(int K, Eigen::Vector2d lower, Eigen::Vector2d upper)
    : K_(K), lower_(lower), upper_(upper), h_(K, K), lambda_(K, K) {
  if (K < 1) throw std::invalid_argument("FourierBasis: K must be >= 1");
  if (!((upper - lower).array() > 0.0).all())
    throw std::invalid_argument("FourierBasis: empty rectangle");
  const Eigen::Vector2d L = upper - lower;
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      const double h1 = a == 0 ? L.x() : 0.5 * L.x();
      const double h2 = b == 0 ? L.y() : 0.5 * L.y();
      h_(a, b) = std::sqrt(h1 * h2);
      lambda_(a, b) = std::pow(1.0 + double(a * a + b * b), -1.5);
    }
}

FourierBasis FourierBasis::for_domain(const GridDomain& domain, int K) {
  if (domain.dims() != 2) throw std::invalid_argument("FourierBasis: planar domain required");
  const Point lo = domain.lower_bound();
  const Point hi = domain.upper_bound();
  return FourierBasis(K, lo.head<2>(), hi.head<2>());
}

namespace {

// cos(k pi t) and k pi / L sin(k pi t) for k < K along one axis.
void axis_terms(int K, double x, double lo, double L, Eigen::VectorXd& c, Eigen::VectorXd& ds) {
  c.resize(K);
  ds.resize(K);
  const double t = (x - lo) / L;
  for (int k = 0; k < K; ++k) {
    const double w = k * M_PI;
    c[k] = std::cos(w * t);
    ds[k] = -(w / L) * std::sin(w * t);
  }
}

}  // namespace

double FourierBasis::value(int k1, int k2, const Eigen::Vector2d& x) const {
  const Eigen::Vector2d L = upper_ - lower_;
  return std::cos(k1 * M_PI * (x.x() - lower_.x()) / L.x()) *
         std::cos(k2 * M_PI * (x.y() - lower_.y()) / L.y()) / h_(k1, k2);
}

Eigen::Vector2d FourierBasis::gradient(int k1, int k2, const Eigen::Vector2d& x) const {
  const Eigen::Vector2d L = upper_ - lower_;
  const double a1 = k1 * M_PI / L.x();
  const double a2 = k2 * M_PI / L.y();
  const double t1 = a1 * (x.x() - lower_.x());
  const double t2 = a2 * (x.y() - lower_.y());
  return Eigen::Vector2d(-a1 * std::sin(t1) * std::cos(t2), -a2 * std::cos(t1) * std::sin(t2)) /
         h_(k1, k2);
}

Eigen::MatrixXd FourierBasis::values(const Eigen::Vector2d& x) const {
  const Eigen::Vector2d L = upper_ - lower_;
  Eigen::VectorXd c1, d1, c2, d2;
  axis_terms(K_, x.x(), lower_.x(), L.x(), c1, d1);
  axis_terms(K_, x.y(), lower_.y(), L.y(), c2, d2);
  return (c1 * c2.transpose()).cwiseQuotient(h_);
}

Eigen::MatrixXd target_coeffs(const ScalarField& p, const FourierBasis& basis) {
  const GridDomain& d = p.domain();
  if (d.dims() != 2) throw std::invalid_argument("target_coeffs: planar domain required");
  const int K = basis.K();
  const Eigen::Vector2d L = basis.upper() - basis.lower();
  const auto nx = d.shape()[0];
  const auto ny = d.shape()[1];
  // Separable: tabulate cosines per axis at the cell centres.
  Eigen::MatrixXd cx(nx, K), cy(ny, K);
  Eigen::VectorXd c, ds;
  for (Index i = 0; i < nx; ++i) {
    axis_terms(K, d.cell_center(i, 0, 0).x(), basis.lower().x(), L.x(), c, ds);
    cx.row(i) = c.transpose();
  }
  for (Index j = 0; j < ny; ++j) {
    axis_terms(K, d.cell_center(0, j, 0).y(), basis.lower().y(), L.y(), c, ds);
    cy.row(j) = c.transpose();
  }
  Eigen::MatrixXd P(nx, ny);
  for (Index i = 0; i < nx; ++i)
    for (Index j = 0; j < ny; ++j) P(i, j) = p.at(i, j, 0);
  const Eigen::MatrixXd raw = cx.transpose() * P * cy;
  Eigen::MatrixXd h(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) h(a, b) = basis.h(a, b);
  return (raw * d.cell_volume()).cwiseQuotient(h);
}

Eigen::MatrixXd target_coeffs(const TargetDistribution& p, const FourierBasis& basis) {
  return target_coeffs(p.field(), basis);
}

SmcState::SmcState(const FourierBasis& basis, Eigen::MatrixXd target)
    : targetCoeffs(std::move(target)),
      trajectoryCoeffs(Eigen::MatrixXd::Zero(basis.K(), basis.K())) {
  if (targetCoeffs.rows() != basis.K() || targetCoeffs.cols() != basis.K())
    throw std::invalid_argument("SmcState: coefficient shape does not match the basis");
}

Eigen::Vector2d smc_direction(const SmcState& state, const FourierBasis& basis,
                              const Eigen::Vector2d& x) {
  const int K = basis.K();
  const Eigen::Vector2d L = basis.upper() - basis.lower();
  Eigen::VectorXd c1, d1, c2, d2;
  axis_terms(K, x.x(), basis.lower().x(), L.x(), c1, d1);
  axis_terms(K, x.y(), basis.lower().y(), L.y(), c2, d2);
  const double t = state.elapsed;
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (int a = 0; a < K; ++a)
    for (int q = 0; q < K; ++q) {
      const double ck = t > 0.0 ? state.trajectoryCoeffs(a, q) / t : 0.0;
      const double coef = basis.lambda(a, q) * (ck - state.targetCoeffs(a, q)) / basis.h(a, q);
      b.x() += coef * d1[a] * c2[q];
      b.y() += coef * c1[a] * d2[q];
    }
  return b;
}

Eigen::Vector2d reflect_into(Eigen::Vector2d x, const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
  for (int i = 0; i < 2; ++i) {
    if (x[i] < lo[i]) x[i] = 2.0 * lo[i] - x[i];
    if (x[i] > hi[i]) x[i] = 2.0 * hi[i] - x[i];
    x[i] = std::clamp(x[i], lo[i], hi[i]);  // step longer than the box
  }
  return x;
}

SmcStep smc_step(SmcState& state, const FourierBasis& basis, const Eigen::Vector2d& x, double dt,
                 double uMax) {
  if (!(dt > 0.0)) throw std::invalid_argument("smc_step: dt must be > 0");
  state.trajectoryCoeffs += basis.values(x) * dt;
  state.elapsed += dt;
  SmcStep out;
  const Eigen::Vector2d b = smc_direction(state, basis, x);
  out.bNorm = b.norm();
  if (out.bNorm >= 1e-12) out.velocity = -uMax * b / out.bNorm;
  out.position = reflect_into(x + out.velocity * dt, basis.lower(), basis.upper());
  return out;
}

SmcArmController::SmcArmController(const KinematicChain& chain, int link, Point tipLocal,
                                   FourierBasis basis, Eigen::MatrixXd targetCoeffs, double uMax,
                                   double damping)
    : chain_(&chain),
      link_(link),
      tipLocal_(std::move(tipLocal)),
      basis_(std::move(basis)),
      state_(basis_, std::move(targetCoeffs)),
      uMax_(uMax),
      damping_(damping) {
  if (chain.dims() != 2) throw std::invalid_argument("SmcArmController: planar chain required");
  if (link < 0 || link >= chain.size()) throw std::out_of_range("SmcArmController: bad link");
}

Eigen::VectorXd SmcArmController::command(const JointConfig& q, double dt) {
  const LinkFrames frames = forward_kinematics(*chain_, q);
  const Point tip = point_on_link(frames, link_, tipLocal_);
  // Evaluate the field at the tip clamped into the box; the arm may reach outside.
  const Eigen::Vector2d x = tip.head<2>().cwiseMax(basis_.lower()).cwiseMin(basis_.upper());
  const SmcStep step = smc_step(state_, basis_, x, dt, uMax_);
  const Eigen::MatrixXd J = link_jacobian(*chain_, frames, link_, tipLocal_).topRows(2);
  return weighted_pinv_solve(J, Eigen::VectorXd::Ones(2), step.velocity, damping_).qdot;
}

}  // namespace wbe
