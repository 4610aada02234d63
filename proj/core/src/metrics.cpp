#include "wbe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wbe {

double ergodicity(const ScalarField& p, const ScalarField& c) {
  require_same_domain(p, c, "ergodicity");
  double sq = 0.0;
  for (Index n = 0; n < p.size(); ++n) {
    const double e = std::max(p[n] - c[n], 0.0);
    sq += e * e;
  }
  const double vol = p.domain().cell_volume();
  const double mass = p.integral();
  if (!(mass > 0.0)) throw std::invalid_argument("ergodicity: target has no mass");
  return std::sqrt(sq * vol) / mass;
}

double ergodicity(const TargetDistribution& p, const ScalarField& c) { return ergodicity(p.field(), c); }

}  // namespace wbe
