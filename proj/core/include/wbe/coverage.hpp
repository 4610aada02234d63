#pragma once

#include <span>

#include "wbe/grid.hpp"

namespace wbe {

/// Non-negative density on a grid, normalized to unit integral on construction.
class TargetDistribution {
 public:
  /// Throws std::invalid_argument on negative, non-finite or all-zero input.
  explicit TargetDistribution(ScalarField density);

  const ScalarField& field() const { return field_; }
  const GridDomain& domain() const { return field_.domain(); }

 private:
  ScalarField field_;
};

struct ResidualSource {
  ScalarField residual;  // e = p - c
  ScalarField source;    // s = max(e, 0)^2
};

ResidualSource residual_and_source(const TargetDistribution& p, const ScalarField& c);

enum class OutOfBounds {
  Clamp,  // project the position onto the domain box and deposit there
  Drop,   // skip the deposit
};

/// Running sum of agent footprints.
///
/// Each deposit adds a radial Gaussian (std = footprintRadius, cut at three
/// std) centred on the agent, scaled so its sum over in-domain cells times
/// the cell volume is exactly one.
class CoverageAccumulator {
 public:
  CoverageAccumulator(GridDomain domain, double footprintRadius,
                      OutOfBounds policy = OutOfBounds::Clamp);

  /// Adds one footprint per position and counts one step.
  /// Returns how many positions were outside the domain.
  int deposit(std::span<const Point> positions);

  const ScalarField& raw() const { return raw_; }
  long steps() const { return steps_; }
  double footprint_radius() const { return radius_; }
  OutOfBounds policy() const { return policy_; }
  const GridDomain& domain() const { return raw_.domain(); }

 private:
  void add_kernel(const Point& x);

  ScalarField raw_;
  long steps_ = 0;
  double radius_;
  OutOfBounds policy_;
};

/// The accumulated coverage rescaled to unit integral (time- and agent-averaged
/// density, comparable with the target). Throws std::logic_error before the
/// first deposit.
ScalarField normalized_coverage(const CoverageAccumulator& cov);

}  // namespace wbe
