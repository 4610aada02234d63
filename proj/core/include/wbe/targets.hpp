#pragma once

#include <string>
#include <vector>

#include "wbe/coverage.hpp"

namespace wbe {

/// Analytic density building block. Boxes are indicator functions of an
/// axis-aligned box; Gaussians are axis-aligned (diagonal covariance).
struct TargetPrimitive {
  enum class Kind { Box, Gaussian };
  Kind kind = Kind::Box;
  Point lower = Point::Zero();  // box
  Point upper = Point::Zero();  // box
  Point mean = Point::Zero();   // gaussian
  Point sigma = Point::Ones();  // gaussian
  double weight = 1.0;
};

/// Unnormalized sum of primitives evaluated at cell centres.
ScalarField evaluate_primitives(const GridDomain& domain, const std::vector<TargetPrimitive>& parts);

/// Uniform density over the whole domain.
TargetDistribution uniform_target(const GridDomain& domain);

TargetDistribution make_target(const GridDomain& domain, const std::vector<TargetPrimitive>& parts);

/// Grayscale image (PGM) interpreted as density.
TargetDistribution image_target(const std::string& path, const GridDomain& domain);

}  // namespace wbe
