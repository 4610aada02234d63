#include "wbe/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wbe {

DiffusionParams DiffusionParams::isotropic(double alpha, int nSteps) {
  DiffusionParams p;
  p.alpha = {alpha, alpha, alpha};
  p.nSteps = nSteps;
  return p;
}

void DiffusionParams::validate(const GridDomain& domain) const {
  for (int a = 0; a < domain.dims(); ++a)
    if (!(alpha[a] > 0.0) || !std::isfinite(alpha[a]))
      throw std::invalid_argument("DiffusionParams: alpha must be positive");
  if (nSteps < 1) throw std::invalid_argument("DiffusionParams: nSteps must be >= 1");
  if (!(stationaryTol > 0.0)) throw std::invalid_argument("DiffusionParams: stationaryTol <= 0");
  if (maxStationaryIters < 1) throw std::invalid_argument("DiffusionParams: maxStationaryIters < 1");
}

double cfl_timestep(const DiffusionParams& params, const GridDomain& domain) {
  params.validate(domain);
  double courant = 0.0;
  double stencil = 0.0;
  for (int a = 0; a < domain.dims(); ++a) {
    const double h = domain.spacing(a);
    courant += params.alpha[a] / h;
    stencil += 2.0 * params.alpha[a] / (h * h);
  }
  return std::min(1.0 / courant, 1.0 / (1.0 + stencil));
}

namespace detail {

void explicit_step(const ScalarField& u, const ScalarField* source,
                   const std::array<double, 3>& alpha, double dt, Terms terms, ScalarField& out) {
  const GridDomain& d = u.domain();
  const Index n0 = d.shape(0), n1 = d.shape(1), n2 = d.shape(2);
  const Index stride[3] = {n1 * n2, n2, 1};
  const Index extent[3] = {n0, n1, n2};
  double coef[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < d.dims(); ++a) coef[a] = alpha[a] / (d.spacing(a) * d.spacing(a));
  const int dims = d.dims();
  const bool full = terms == Terms::Full;
  const double* in = u.values().data();
  const double* src = source ? source->values().data() : nullptr;
  double* dst = out.values().data();

  Index idx[3];
  for (idx[0] = 0; idx[0] < n0; ++idx[0]) {
    for (idx[1] = 0; idx[1] < n1; ++idx[1]) {
      const Index row = idx[0] * stride[0] + idx[1] * stride[1];
      for (idx[2] = 0; idx[2] < n2; ++idx[2]) {
        const Index c = row + idx[2];
        const double uc = in[c];
        double lap = 0.0;
        for (int a = 0; a < dims; ++a) {
          // Mirrored ghost cells: the missing neighbour equals the cell itself.
          const double lo = idx[a] > 0 ? in[c - stride[a]] : uc;
          const double hi = idx[a] + 1 < extent[a] ? in[c + stride[a]] : uc;
          lap += coef[a] * (lo - 2.0 * uc + hi);
        }
        double rate = lap;
        if (full) rate += (src ? src[c] : 0.0) - uc;
        dst[c] = uc + dt * rate;
      }
    }
  }
}

}  // namespace detail

ScalarField laplacian(const ScalarField& u) {
  ScalarField out(u.domain());
  const std::array<double, 3> unit{1.0, 1.0, 1.0};
  // Pure-diffusion step with dt = 1 gives u + Lap(u).
  detail::explicit_step(u, nullptr, unit, 1.0, detail::Terms::PureDiffusion, out);
  out -= u;
  return out;
}

namespace {

void check_step(const ScalarField& u, const ScalarField& s, const DiffusionParams& params,
                double dt) {
  require_same_domain(u, s, "diffuse_step");
  const double bound = cfl_timestep(params, u.domain());
  if (!(dt > 0.0) || dt > bound * (1.0 + 1e-12))
    throw std::invalid_argument("diffuse_step: dt exceeds the CFL bound");
}

}  // namespace

ScalarField diffuse_step(const ScalarField& u, const ScalarField& s, const DiffusionParams& params,
                         double dt) {
  check_step(u, s, params, dt);
  ScalarField out(u.domain());
  detail::explicit_step(u, &s, params.alpha, dt, detail::Terms::Full, out);
  return out;
}

ScalarField diffuse_step_unchecked(const ScalarField& u, const ScalarField& s,
                                   const DiffusionParams& params, double dt) {
  require_same_domain(u, s, "diffuse_step_unchecked");
  ScalarField out(u.domain());
  detail::explicit_step(u, &s, params.alpha, dt, detail::Terms::Full, out);
  return out;
}

ScalarField diffuse(const ScalarField& u, const ScalarField& s, const DiffusionParams& params) {
  const double dt = cfl_timestep(params, u.domain());
  check_step(u, s, params, dt);
  ScalarField cur = u;
  ScalarField scratch(u.domain());
  diffuse_in_place(cur, s, params, dt, params.nSteps, scratch);
  return cur;
}

void diffuse_in_place(ScalarField& u, const ScalarField& s, const DiffusionParams& params,
                      double dt, int steps, ScalarField& scratch) {
  require_same_domain(u, s, "diffuse_in_place");
  if (!(scratch.domain() == u.domain())) scratch = ScalarField(u.domain());
  for (int k = 0; k < steps; ++k) {
    detail::explicit_step(u, &s, params.alpha, dt, detail::Terms::Full, scratch);
    std::swap(u.values(), scratch.values());
  }
}

StationaryResult stationary_solve(const ScalarField& s, const DiffusionParams& params,
                                  const ScalarField* initial) {
  const GridDomain& d = s.domain();
  const double dt = cfl_timestep(params, d);
  ScalarField u = initial ? *initial : ScalarField(d);
  require_same_domain(u, s, "stationary_solve");
  ScalarField next(d);

  StationaryResult result{ScalarField(d), 0, std::numeric_limits<double>::infinity(), false};
  for (int it = 0; it < params.maxStationaryIters; ++it) {
    detail::explicit_step(u, &s, params.alpha, dt, detail::Terms::Full, next);
    // The step change is exactly dt times the defect at u.
    double change = 0.0;
    for (Index n = 0; n < u.size(); ++n) change = std::max(change, std::abs(next[n] - u[n]));
    result.iterations = it + 1;
    result.defect = change / dt;
    if (result.defect < params.stationaryTol) {
      result.converged = true;
      break;
    }
    std::swap(u.values(), next.values());
  }
  result.field = std::move(u);
  return result;
}

ScalarField pure_diffusion_step(const ScalarField& u, const DiffusionParams& params, double dt) {
  ScalarField out(u.domain());
  detail::explicit_step(u, nullptr, params.alpha, dt, detail::Terms::PureDiffusion, out);
  return out;
}

}  // namespace wbe
