#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbe/metrics.hpp"
#include "wbe/targets.hpp"

using namespace wbe;

namespace {

double l2(const ScalarField& f) {
  double s = 0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.domain().cell_volume());
}

ScalarField roll(const ScalarField& f, Index di, Index dj) {
  const GridDomain& d = f.domain();
  ScalarField out(d);
  for (Index i = 0; i < d.shape(0); ++i)
    for (Index j = 0; j < d.shape(1); ++j)
      out.at((i + di) % d.shape(0), (j + dj) % d.shape(1)) = f.at(i, j);
  return out;
}

}  // namespace

TEST(Ergodicity, Identities) {
  const GridDomain d = GridDomain::planar(14, 9, 0.3, 0.2);
  std::mt19937_64 rng(31);
  const ScalarField raw = test::random_field(d, rng, 0, 4);
  const TargetDistribution p(raw);
  EXPECT_EQ(ergodicity(p, p.field()), 0.0);
  EXPECT_NEAR(ergodicity(p, ScalarField(d)), l2(p.field()) / p.field().integral(), 1e-14);
  EXPECT_EQ(ergodicity(p, p.field() * 1.5), 0.0);
  // Unnormalized input keeps the integral in the denominator.
  EXPECT_NEAR(ergodicity(raw, ScalarField(d)), l2(raw) / raw.integral(), 1e-14);
  EXPECT_THROW(ergodicity(raw, ScalarField(GridDomain::planar(3, 3, 1, 1))), std::invalid_argument);
}

TEST(Ergodicity, OnlyPositiveResidualCounts) {
  const GridDomain d = GridDomain::planar(4, 4, 1, 1);
  ScalarField p(d, 1.0);
  ScalarField c(d, 1.0);
  c.at(0, 0) = 0.0;   // residual +1
  c.at(3, 3) = 10.0;  // residual -9, ignored
  EXPECT_NEAR(ergodicity(p, c), 1.0 / 16.0, 1e-15);
}

TEST(Ergodicity, TranslationInvariantOnPeriodicShift) {
  const GridDomain d = GridDomain::planar(16, 16, 1, 1);
  std::mt19937_64 rng(33);
  for (int t = 0; t < 10; ++t) {
    const ScalarField p = test::random_field(d, rng, 0, 1);
    const ScalarField c = test::random_field(d, rng, 0, 1);
    const Index di = static_cast<Index>(rng() % 16), dj = static_cast<Index>(rng() % 16);
    EXPECT_NEAR(ergodicity(p, c), ergodicity(roll(p, di, dj), roll(c, di, dj)), 1e-14);
  }
}
