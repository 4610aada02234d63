#include "wbe/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace wbe {

TargetDistribution::TargetDistribution(ScalarField density) : field_(std::move(density)) {
  for (double v : field_.values())
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("TargetDistribution: density must be finite and >= 0");
  const double mass = field_.integral();
  if (!(mass > 0.0)) throw std::invalid_argument("TargetDistribution: density has zero mass");
  field_ *= 1.0 / mass;
}

ResidualSource residual_and_source(const TargetDistribution& p, const ScalarField& c) {
  require_same_domain(p.field(), c, "residual_and_source");
  ResidualSource out{p.field() - c, ScalarField(c.domain())};
  for (Index n = 0; n < c.size(); ++n) {
    const double e = std::max(out.residual[n], 0.0);
    out.source[n] = e * e;
  }
  return out;
}

CoverageAccumulator::CoverageAccumulator(GridDomain domain, double footprintRadius,
                                         OutOfBounds policy)
    : raw_(domain), radius_(footprintRadius), policy_(policy) {
  if (!(footprintRadius > 0.0) || !std::isfinite(footprintRadius))
    throw std::invalid_argument("CoverageAccumulator: footprint radius must be positive");
}

int CoverageAccumulator::deposit(std::span<const Point> positions) {
  int outside = 0;
  const GridDomain& d = raw_.domain();
  for (const Point& x : positions) {
    if (!d.contains(x)) {
      ++outside;
      if (policy_ == OutOfBounds::Drop) continue;
      add_kernel(d.clamp(x));
    } else {
      add_kernel(x);
    }
  }
  ++steps_;
  return outside;
}

void CoverageAccumulator::add_kernel(const Point& x) {
  const GridDomain& d = raw_.domain();
  const double cut = 3.0 * radius_;
  const double inv2var = 1.0 / (2.0 * radius_ * radius_);
  const Point g = d.to_grid(x);

  std::array<Index, 3> lo{0, 0, 0};
  std::array<Index, 3> hi{0, 0, 0};
  std::array<std::vector<double>, 3> dist2;
  for (int a = 0; a < d.dims(); ++a) {
    const double reach = cut / d.spacing(a);
    lo[a] = std::max<Index>(0, static_cast<Index>(std::ceil(g[a] - reach)));
    hi[a] = std::min<Index>(d.shape(a) - 1, static_cast<Index>(std::floor(g[a] + reach)));
    for (Index i = lo[a]; i <= hi[a]; ++i) {
      const double off = (static_cast<double>(i) - g[a]) * d.spacing(a);
      dist2[a].push_back(off * off);
    }
  }
  if (d.dims() == 2) dist2[2].assign(1, 0.0);

  const double cut2 = cut * cut;
  double total = 0.0;
  std::vector<std::pair<Index, double>> cells;
  for (Index i = lo[0]; i <= hi[0]; ++i)
    for (Index j = lo[1]; j <= hi[1]; ++j)
      for (Index k = lo[2]; k <= hi[2]; ++k) {
        const double r2 = dist2[0][i - lo[0]] + dist2[1][j - lo[1]] + dist2[2][k - lo[2]];
        if (r2 > cut2) continue;
        const double w = std::exp(-r2 * inv2var);
        cells.emplace_back(d.linear(i, j, k), w);
        total += w;
      }

  if (cells.empty() || !(total > 0.0)) {
    // Footprint narrower than a cell: everything lands in the nearest cell.
    std::array<Index, 3> n{0, 0, 0};
    for (int a = 0; a < d.dims(); ++a)
      n[a] = std::clamp<Index>(static_cast<Index>(std::lround(g[a])), 0, d.shape(a) - 1);
    raw_.at(n[0], n[1], n[2]) += 1.0 / d.cell_volume();
    return;
  }
  const double scale = 1.0 / (total * d.cell_volume());
  for (const auto& [n, w] : cells) raw_[n] += w * scale;
}

ScalarField normalized_coverage(const CoverageAccumulator& cov) {
  if (cov.steps() == 0)
    throw std::logic_error("normalized_coverage: no deposits yet, coverage is undefined");
  ScalarField c = cov.raw();
  const double mass = c.integral();
  // Every deposit was dropped: nothing has been covered.
  if (mass > 0.0) c *= 1.0 / mass;
  return c;
}

}  // namespace wbe
