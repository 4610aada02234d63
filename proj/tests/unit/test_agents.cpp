#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbe/agents.hpp"

using namespace wbe;

namespace {

KinematicChain panda() { return load_chain_model(test::data_path("models/panda.model")); }

double min_pairwise(const std::vector<VirtualAgent>& a) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) m = std::min(m, (a[i].local - a[j].local).norm());
  return m;
}

ScalarField ramp(const GridDomain& d, const Eigen::Vector2d& slope, double offset) {
  ScalarField u(d);
  for (Index i = 0; i < d.shape(0); ++i)
    for (Index j = 0; j < d.shape(1); ++j) u.at(i, j) = offset + slope.dot(d.cell_center(i, j).head<2>());
  return u;
}

}  // namespace

TEST(Equispaced, Examples) {
  const auto unit = sample_agents_equispaced(planar_chain(1, 1.0), 0, 1.0);
  ASSERT_EQ(unit.size(), 2u);
  EXPECT_TRUE(unit[0].local.isApprox(Point(0, 0, 0)));
  EXPECT_TRUE(unit[1].local.isApprox(Point(1, 0, 0)));
  const auto five = sample_agents_equispaced(planar_chain(1, 2.0), 0, 0.5);
  ASSERT_EQ(five.size(), 5u);
  EXPECT_TRUE(five[2].local.isApprox(Point(1, 0, 0)));
  const auto one = sample_agents_equispaced(planar_chain(1, 1.0), 0, 10.0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one[0].local.isApprox(Point(0.5, 0, 0)));
  EXPECT_THROW(sample_agents_equispaced(planar_chain(1, 1.0), 0, 0.0), std::invalid_argument);
  // Seven-unit link at unit spacing: eight agents, the last one on the tip.
  const auto seven = sample_agents_equispaced(planar_chain(5, 7.0), 4, 1.0);
  EXPECT_EQ(seven.size(), 8u);
  EXPECT_TRUE(seven.back().local.isApprox(Point(7, 0, 0)));
}

TEST(Poisson, MinimumDistanceOverSeeds) {
  const KinematicChain c = panda();
  for (int link : {4, 5, 6}) {
    const LinkGeometry& g = c.link(link);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto agents = sample_agents_poisson(c, link, 0.03, seed);
      ASSERT_GE(agents.size(), 2u);
      EXPECT_GE(min_pairwise(agents), 0.03);
      for (const VirtualAgent& a : agents) {
        EXPECT_EQ(a.link, link);
        // On the capsule surface.
        EXPECT_NEAR(point_segment_distance(a.local, g.p0, g.p1), g.radius, 1e-12);
      }
    }
  }
}

TEST(Poisson, DeterministicPerSeed) {
  const KinematicChain c = panda();
  EXPECT_EQ(sample_agents_poisson(c, 6, 0.02, 7), sample_agents_poisson(c, 6, 0.02, 7));
  EXPECT_NE(sample_agents_poisson(c, 6, 0.02, 7), sample_agents_poisson(c, 6, 0.02, 8));
}

TEST(Poisson, HugeRadiusGivesOneAgent) {
  const KinematicChain c = panda();
  const LinkGeometry& g = c.link(6);
  const double radius = g.length() + 2 * g.radius + 1e-6;
  const auto agents = sample_agents_poisson(c, 6, radius, 3);
  ASSERT_EQ(agents.size(), 1u);
  // Brute force: no pair of surface points is that far apart.
  std::mt19937_64 rng(5);
  double far = 0.0;
  for (int n = 0; n < 20; ++n) {
    const auto pts = sample_agents_poisson(c, 6, 0.01, rng());
    for (const VirtualAgent& a : pts) far = std::max(far, (a.local - agents[0].local).norm());
  }
  EXPECT_LT(far, radius);
}

TEST(Poisson, PlanarSegment) {
  const KinematicChain c = planar_chain(2, 7.0);
  const auto agents = sample_agents_poisson(c, 1, 1.0, 11);
  EXPECT_GE(min_pairwise(agents), 1.0);
  for (const VirtualAgent& a : agents) {
    EXPECT_EQ(a.local.y(), 0.0);
    EXPECT_GE(a.local.x(), 0.0);
    EXPECT_LE(a.local.x(), 7.0);
  }
}

TEST(Layout, ActiveLinksAndPositions) {
  const KinematicChain c = planar_chain(3, 1.0);
  std::vector<VirtualAgent> a{{0, Point(0.5, 0, 0), false}, {2, Point(1, 0, 0), true}, {2, Point(0, 0, 0), false}};
  const AgentLayout layout(a);
  EXPECT_EQ(layout.active_links(), (std::set<int>{2}));
  EXPECT_EQ(layout.active_on(2), (std::vector<std::size_t>{1}));
  const auto pos = layout.positions(forward_kinematics(c, Eigen::Vector3d::Zero()));
  ASSERT_EQ(pos.size(), 3u);
  EXPECT_TRUE(pos[1].isApprox(Point(3, 0, 0)));
  EXPECT_THROW(AgentLayout({{-1, Point::Zero(), true}}), std::invalid_argument);
}

TEST(Layout, CsvRoundTrip) {
  const AgentLayout layout(sample_agents_poisson(panda(), 5, 0.03, 2));
  std::stringstream io;
  write_layout_csv(layout, io);
  EXPECT_EQ(io.str().substr(0, 19), "link,x,y,z,active\n5");
  const AgentLayout back = read_layout_csv(io);
  EXPECT_EQ(back.agents(), layout.agents());
  std::istringstream bad("oops\n");
  EXPECT_THROW(read_layout_csv(bad), std::runtime_error);
}

TEST(LocalWeights, Examples) {
  const GridDomain d = GridDomain::planar(10, 10, 1, 1);
  const std::vector<Point> four{Point(1, 1, 0), Point(2, 5, 0), Point(7, 3, 0), Point(4, 4, 0)};
  for (double w : local_weights(ScalarField(d, 3.0), four)) EXPECT_DOUBLE_EQ(w, 0.25);

  ScalarField u(d);
  u.at(2, 2) = 1.0;
  u.at(5, 5) = 3.0;
  const auto w = local_weights(u, {Point(2, 2, 0), Point(5, 5, 0)});
  EXPECT_DOUBLE_EQ(w[0], 0.25);
  EXPECT_DOUBLE_EQ(w[1], 0.75);

  for (double x : local_weights(ScalarField(d, 1e-15), four)) EXPECT_DOUBLE_EQ(x, 0.25);
  EXPECT_THROW(local_weights(u, {}), std::invalid_argument);
}

TEST(LocalWeights, SumToOneAndMonotone) {
  const GridDomain d = GridDomain::planar(20, 20, 1, 1);
  std::mt19937_64 rng(61);
  for (int t = 0; t < 50; ++t) {
    const ScalarField u = test::random_field(d, rng, 0, 1);
    std::vector<Point> x;
    for (int a = 0; a < 8; ++a) x.emplace_back(test::uniform(rng, 0, 19), test::uniform(rng, 0, 19), 0);
    const auto w = local_weights(u, x);
    double sum = 0;
    for (std::size_t a = 0; a < w.size(); ++a) {
      sum += w[a];
      EXPECT_GE(w[a], 0.0);
      EXPECT_LE(w[a], 1.0);
      for (std::size_t b = 0; b < w.size(); ++b)
        if (sample_value(u, x[a]) >= sample_value(u, x[b])) EXPECT_GE(w[a], w[b]);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(AgentForces, Examples) {
  const GridDomain d = GridDomain::planar(12, 12, 1, 1);
  const Eigen::Vector2d slope(0.3, -0.2);
  const ScalarField u = ramp(d, slope, 10.0);
  const std::vector<Point> x{Point(3, 3, 0), Point(6, 8, 0), Point(8, 2, 0)};
  for (const auto& f : agent_forces(u, x, {0, 0, 0})) EXPECT_EQ(f.norm(), 0.0);
  const std::vector<double> uniformW(3, 1.0 / 3.0);
  const auto f = agent_forces(u, x, uniformW);
  for (const auto& fi : f) EXPECT_LT((fi.head<2>() - slope / 3.0).norm(), 1e-12);
  const auto g = agent_forces(u, x, {1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0});
  EXPECT_LT((g[1] - 2.0 * f[1]).norm(), 1e-15);
  EXPECT_THROW(agent_forces(u, x, {1.0}), std::invalid_argument);
}

TEST(LinkWrench, Examples) {
  const Point com(1, 2, 0);
  const Eigen::Vector3d f(0.5, 1.0, 0);
  const LinkWrench sym = link_wrench({f, f}, {com + Point(0.3, -0.6, 0), com - Point(0.3, -0.6, 0)}, com, 4);
  EXPECT_EQ(sym.link, 4);
  EXPECT_LT(sym.moment.norm(), 1e-15);
  EXPECT_TRUE(sym.force.isApprox(2 * f));
  const LinkWrench through = link_wrench({f}, {com + 2.0 * f}, com);
  EXPECT_LT(through.moment.norm(), 1e-15);
  const Eigen::Vector3d r(-2.0, 1.0, 0);  // perpendicular to f
  const LinkWrench lever = link_wrench({f}, {com + r}, com);
  EXPECT_NEAR(lever.moment.norm(), r.norm() * f.norm(), 1e-12);
  EXPECT_NEAR(lever.moment.z(), r.x() * f.y() - r.y() * f.x(), 1e-12);
}

TEST(LinkWrench, Equivariance) {
  std::mt19937_64 rng(67);
  auto v3 = [&] { return Eigen::Vector3d(test::uniform(rng, -1, 1), test::uniform(rng, -1, 1), test::uniform(rng, -1, 1)); };
  for (int t = 0; t < 50; ++t) {
    std::vector<Eigen::Vector3d> f;
    std::vector<Point> x;
    for (int a = 0; a < 6; ++a) {
      f.push_back(v3());
      x.push_back(v3());
    }
    const Point com = v3(), shift = v3();
    const LinkWrench w0 = link_wrench(f, x, com);
    std::vector<Point> moved = x;
    for (Point& p : moved) p += shift;
    EXPECT_LT((link_wrench(f, moved, com + shift).moment - w0.moment).norm(), 1e-12);
    const LinkWrench w1 = link_wrench(f, x, com + shift);
    EXPECT_LT((w1.moment - (w0.moment - shift.cross(w0.force))).norm(), 1e-12);
  }
}

TEST(LinkWeight, Examples) {
  const KinematicChain c = planar_chain(3, 1.0);
  // Link 0 has a single column for three twist rows: rank deficient.
  EXPECT_EQ(link_weight(c, Eigen::Vector3d(0.3, 0.4, 0.5), 0), 0.0);
  const double w = link_weight(c, Eigen::Vector3d(0.3, 0.4, 0.5), 2);
  EXPECT_GT(w, 0.0);

  std::vector<double> lengths{1, 1, 1};
  std::vector<std::pair<double, double>> lim(3, {-M_PI, M_PI});
  KinematicChain heavy = planar_chain(lengths, Point::Zero(), lim);
  std::vector<LinkGeometry> links = heavy.links();
  links[2].volume *= 2;
  heavy = KinematicChain(2, heavy.base(), heavy.joints(), links);
  EXPECT_NEAR(link_weight(heavy, Eigen::Vector3d(0.3, 0.4, 0.5), 2), 2 * w, 1e-12);

  const auto n = normalize_link_weights({w, w});
  EXPECT_DOUBLE_EQ(n[0], 0.5);
  EXPECT_DOUBLE_EQ(n[1], 0.5);
  const auto z = normalize_link_weights({0.0, 1e-14, 0.0});
  for (double x : z) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
  const auto m = normalize_link_weights({1.0, 3.0});
  EXPECT_DOUBLE_EQ(m[1], 0.75);
}
