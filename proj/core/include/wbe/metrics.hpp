#pragma once

#include "wbe/coverage.hpp"

namespace wbe {

/// Normalized ergodicity: L2 norm (cell-volume weighted) of max(p - c, 0)
/// divided by the integral of p. Zero for perfect or over-coverage.
double ergodicity(const ScalarField& p, const ScalarField& c);
double ergodicity(const TargetDistribution& p, const ScalarField& c);

}  // namespace wbe
