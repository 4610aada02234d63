#pragma once

#include <array>

#include "wbe/grid.hpp"

namespace wbe {

struct DiffusionParams {
  /// Per-axis diffusion rate (area per unit time).
  std::array<double, 3> alpha{1.0, 1.0, 1.0};
  /// Explicit integration steps per control step.
  int nSteps = 1;
  /// Max-norm of the stationary defect alpha*Lap(u) - u + s accepted as converged.
  double stationaryTol = 1e-8;
  int maxStationaryIters = 100000;

  static DiffusionParams isotropic(double alpha, int nSteps = 1);
  /// Throws std::invalid_argument on non-positive rates or step counts.
  void validate(const GridDomain& domain) const;
};

/// Largest stable explicit step for du/dt = alpha*Lap(u) - u + s.
///
/// Minimum of the Courant bound dt * sum_i(alpha_i / dx_i) <= 1 and the
/// positivity bound dt * (1 + sum_i 2 alpha_i / dx_i^2) <= 1. The second one
/// keeps every stencil coefficient non-negative, so each step is a convex
/// combination of neighbour values and the source, and max|u| cannot grow.
double cfl_timestep(const DiffusionParams& params, const GridDomain& domain);

/// Second-difference Laplacian per axis with mirrored ghost cells (zero flux).
ScalarField laplacian(const ScalarField& u);

/// One explicit Euler step u + dt * (alpha*Lap(u) - u + s).
/// Rejects mismatched grids and steps above cfl_timestep.
ScalarField diffuse_step(const ScalarField& u, const ScalarField& s, const DiffusionParams& params,
                         double dt);

/// nSteps explicit steps at the CFL step size.
ScalarField diffuse(const ScalarField& u, const ScalarField& s, const DiffusionParams& params);

/// In-place variant of diffuse() for control loops; scratch is resized as needed.
void diffuse_in_place(ScalarField& u, const ScalarField& s, const DiffusionParams& params,
                      double dt, int steps, ScalarField& scratch);

struct StationaryResult {
  ScalarField field;
  int iterations = 0;
  /// Max-norm of alpha*Lap(u) - u + s at the returned field.
  double defect = 0.0;
  bool converged = false;
};

/// Fixed point of the explicit iteration, i.e. the solution of
/// alpha*Lap(u) = u - s. Iterates from `initial` (zero when omitted) until the
/// defect drops below params.stationaryTol or the iteration cap is reached;
/// the result reports which of the two happened.
StationaryResult stationary_solve(const ScalarField& s, const DiffusionParams& params,
                                  const ScalarField* initial = nullptr);

namespace detail {

enum class Terms { Full, PureDiffusion };

/// Unchecked explicit step; writes into out (same grid as u).
void explicit_step(const ScalarField& u, const ScalarField* source,
                   const std::array<double, 3>& alpha, double dt, Terms terms, ScalarField& out);

}  // namespace detail

/// Test mode: dt * alpha*Lap(u) only, no decay or source. Conserves the integral.
ScalarField pure_diffusion_step(const ScalarField& u, const DiffusionParams& params, double dt);

/// Explicit step without the CFL guard. Used to show the bound is tight.
ScalarField diffuse_step_unchecked(const ScalarField& u, const ScalarField& s,
                                   const DiffusionParams& params, double dt);

}  // namespace wbe
