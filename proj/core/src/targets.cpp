#include "wbe/targets.hpp"

#include <cmath>

#include "wbe/field_io.hpp"

namespace wbe {

ScalarField evaluate_primitives(const GridDomain& domain, const std::vector<TargetPrimitive>& parts) {
  ScalarField f(domain);
  for (Index n = 0; n < f.size(); ++n) {
    const auto idx = domain.unravel(n);
    const Point x = domain.cell_center(idx[0], idx[1], idx[2]);
    double v = 0.0;
    for (const TargetPrimitive& p : parts) {
      if (p.kind == TargetPrimitive::Kind::Box) {
        bool inside = true;
        for (int a = 0; a < domain.dims(); ++a)
          inside = inside && x[a] >= p.lower[a] && x[a] <= p.upper[a];
        if (inside) v += p.weight;
      } else {
        double e = 0.0;
        for (int a = 0; a < domain.dims(); ++a) {
          const double z = (x[a] - p.mean[a]) / p.sigma[a];
          e += z * z;
        }
        v += p.weight * std::exp(-0.5 * e);
      }
    }
    f[n] = v;
  }
  return f;
}

TargetDistribution uniform_target(const GridDomain& domain) {
  return TargetDistribution(ScalarField(domain, 1.0));
}

TargetDistribution make_target(const GridDomain& domain, const std::vector<TargetPrimitive>& parts) {
  return TargetDistribution(evaluate_primitives(domain, parts));
}

TargetDistribution image_target(const std::string& path, const GridDomain& domain) {
  return TargetDistribution(read_pgm(path, domain));
}

}  // namespace wbe
