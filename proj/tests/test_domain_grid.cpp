#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "ndlab/domain_grid.hpp"
#include "ndlab/error.hpp"

using namespace ndlab;

namespace {

// Independent membership oracles (strict interiors) on lattice points.
bool in_square(int i, int j, int n) { return i > 0 && i < n && j > 0 && j < n; }
bool in_l_shape(int i, int j, int n) { return in_square(i, j, n) && !(2 * i >= n && 2 * j >= n); }

std::size_t brute_force_count(int n, bool (*inside)(int, int, int)) {
  std::size_t count = 0;
  for (int j = -2; j <= n + 2; ++j)
    for (int i = -2; i <= n + 2; ++i) count += inside(i, j, n);
  return count;
}

}  // namespace

TEST(DomainGrid, UnitSquareCounts) {
  for (int n : {4, 8, 16, 32}) {
    const DomainGrid g = build_domain(ShapeSpec::unit_square(), 1.0 / n);
    EXPECT_EQ(g.num_interior(), static_cast<std::size_t>((n - 1) * (n - 1)));
    EXPECT_EQ(g.num_boundary(), static_cast<std::size_t>(4 * n));
  }
}

TEST(DomainGrid, LShapeMatchesBruteForce) {
  for (int n : {4, 8, 16, 64}) {
    const DomainGrid g = build_domain(ShapeSpec::l_shape(), 1.0 / n);
    EXPECT_EQ(g.num_interior(), brute_force_count(n, in_l_shape)) << n;
    for (const GridNode& node : g.interior()) EXPECT_TRUE(in_l_shape(node.i, node.j, n));
  }
}

TEST(DomainGrid, OrderingIsInteriorThenBoundaryRowMajor) {
  const DomainGrid g = build_domain(ShapeSpec::l_shape(), 1.0 / 8);
  auto before = [](const GridNode& a, const GridNode& b) { return a.j < b.j || (a.j == b.j && a.i < b.i); };
  for (std::size_t k = 1; k < g.num_interior(); ++k) EXPECT_TRUE(before(g.interior()[k - 1], g.interior()[k]));
  for (std::size_t k = 1; k < g.num_boundary(); ++k) EXPECT_TRUE(before(g.boundary()[k - 1], g.boundary()[k]));
  for (std::size_t k = 0; k < g.num_nodes(); ++k) {
    const GridNode& n = g.nodes()[k];
    EXPECT_EQ(g.find(n.i, n.j), static_cast<int>(k));
    EXPECT_EQ(n.pos.x, n.i * g.h());
    EXPECT_EQ(n.pos.y, n.j * g.h());
  }
  EXPECT_EQ(g.find(100, 100), -1);
}

TEST(DomainGrid, BoundaryNodesSurroundInteriorAndCarryTraces) {
  const DomainGrid g = build_domain(ShapeSpec::disk({0.5, 0.5}, 0.5), 1.0 / 16);
  for (const GridNode& n : g.interior()) {
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) EXPECT_GE(g.find(n.i + di, n.j + dj), 0);
    EXPECT_LT(distance(n.pos, {0.5, 0.5}), 0.5);
  }
  for (const GridNode& n : g.boundary()) {
    EXPECT_NEAR(distance(n.trace, {0.5, 0.5}), 0.5, 1e-12);
    EXPECT_LE(distance(n.trace, n.pos), g.h() * std::sqrt(2.0) + 1e-12);
  }
}

TEST(DomainGrid, GridsWithEqualSpacingShareCoordinates) {
  const DomainGrid a = build_domain(ShapeSpec::l_shape(), 1.0 / 16);
  const DomainGrid b = build_domain(ShapeSpec::unit_square(), 1.0 / 16);
  for (const GridNode& n : a.interior()) {
    const int k = b.find(n.i, n.j);
    ASSERT_GE(k, 0);
    EXPECT_EQ(b.nodes()[static_cast<std::size_t>(k)].pos.x, n.pos.x);
    EXPECT_EQ(b.nodes()[static_cast<std::size_t>(k)].pos.y, n.pos.y);
  }
}

TEST(DomainGrid, PuncturedDiskRemovesCentreNode) {
  const DomainGrid full = build_domain(ShapeSpec::disk({0.5, 0.5}, 0.5), 1.0 / 16);
  const DomainGrid punct = build_domain(ShapeSpec::punctured_disk({0.5, 0.5}, 0.5, 0.0), 1.0 / 16);
  EXPECT_EQ(punct.num_interior() + 1, full.num_interior());
  const int centre = punct.find(8, 8);
  ASSERT_GE(centre, 0);
  EXPECT_FALSE(punct.is_interior(static_cast<std::size_t>(centre)));
  EXPECT_EQ(punct.nodes()[static_cast<std::size_t>(centre)].trace.x, 0.5);
  EXPECT_FALSE(punct.shape().flags().wiener_regular);
  EXPECT_TRUE(full.shape().flags().wiener_regular);
  EXPECT_TRUE(punct.interior_connected());
}

TEST(DomainGrid, EmptyInteriorIsReported) {
  try {
    build_domain(ShapeSpec::disk({0.3, 0.3}, 0.1), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInterior);
  }
  EXPECT_EQ(build_domain(ShapeSpec::unit_square(), 0.5).num_interior(), 1u);
}

TEST(DomainGrid, PolygonValidation) {
  EXPECT_THROW(ShapeSpec::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), Error);  // bow tie
  EXPECT_THROW(ShapeSpec::polygon({{0, 0}, {1, 0}}), Error);
  // Clockwise input is reoriented and rasterizes like the square.
  const ShapeSpec cw = ShapeSpec::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_EQ(build_domain(cw, 1.0 / 8).num_interior(), 49u);
}

TEST(DomainGrid, DisconnectedInteriorDetected) {
  // Two squares joined by a corridor thinner than the mesh width.
  const ShapeSpec dumbbell = ShapeSpec::polygon({{0, 0}, {0.4, 0}, {0.4, 0.45}, {0.6, 0.45}, {0.6, 0}, {1, 0},
                                                 {1, 1}, {0.6, 1}, {0.6, 0.55}, {0.4, 0.55}, {0.4, 1}, {0, 1}});
  EXPECT_TRUE(build_domain(dumbbell, 1.0 / 32).interior_connected());
  const ShapeSpec split = ShapeSpec::polygon({{0, 0}, {0.4, 0}, {0.4, 0.52}, {0.6, 0.52}, {0.6, 0}, {1, 0},
                                              {1, 1}, {0.6, 1}, {0.6, 0.56}, {0.4, 0.56}, {0.4, 1}, {0, 1}});
  EXPECT_FALSE(build_domain(split, 1.0 / 8).interior_connected());
}

TEST(DomainGrid, InterpolationExactAtNodesAndOnAffineData) {
  const DomainGrid g = build_domain(ShapeSpec::unit_square(), 1.0 / 8);
  Vector v(static_cast<Eigen::Index>(g.num_nodes()));
  for (std::size_t k = 0; k < g.num_nodes(); ++k) v[static_cast<Eigen::Index>(k)] = 2 * g.nodes()[k].pos.x - 3 * g.nodes()[k].pos.y + 1;
  for (std::size_t k = 0; k < g.num_nodes(); ++k) EXPECT_EQ(g.interpolate(v, g.nodes()[k].pos), v[static_cast<Eigen::Index>(k)]);
  EXPECT_NEAR(g.interpolate(v, {0.33, 0.71}), 2 * 0.33 - 3 * 0.71 + 1, 1e-14);
  EXPECT_THROW(g.interpolate(v, {3.0, 3.0}), Error);
}

TEST(DomainGrid, JsonRoundTrip) {
  const ShapeSpec shapes[] = {ShapeSpec::unit_square(), ShapeSpec::l_shape(), ShapeSpec::disk({0.4, 0.6}, 0.3),
                              ShapeSpec::punctured_disk({0.5, 0.5}, 0.5, 0.1),
                              ShapeSpec::polygon({{0, 0}, {2, 0}, {1, 1.5}})};
  for (const ShapeSpec& s : shapes) {
    std::optional<double> h;
    const ShapeSpec back = shape_from_json(shape_to_json(s, 0.125), &h);
    EXPECT_EQ(shape_to_json(back), shape_to_json(s));
    EXPECT_EQ(h, 0.125);
  }
  EXPECT_THROW(shape_from_json(nlohmann::json{{"kind", "hexagon"}}), Error);
  EXPECT_THROW(shape_from_json(nlohmann::json{{"kind", "disk"}, {"params", {{"radius", "big"}}}}), Error);
}

TEST(DomainGrid, EnclosingBallInjectsEveryNode) {
  for (const ShapeSpec& s : {ShapeSpec::unit_square(), ShapeSpec::l_shape(), ShapeSpec::disk({0.5, 0.5}, 0.5)}) {
    const DomainGrid g = build_domain(s, 1.0 / 16);
    const EnclosingBall ball = enclosing_ball(g, 0.5);
    ASSERT_EQ(ball.injection.size(), g.num_nodes());
    std::set<int> targets(ball.injection.begin(), ball.injection.end());
    EXPECT_EQ(targets.size(), g.num_nodes());
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
      const GridNode& b = ball.grid.nodes()[static_cast<std::size_t>(ball.injection[k])];
      EXPECT_EQ(b.i, g.nodes()[k].i);
      EXPECT_EQ(b.j, g.nodes()[k].j);
      EXPECT_TRUE(ball.grid.is_interior(static_cast<std::size_t>(ball.injection[k])));
    }
  }
  EXPECT_THROW(enclosing_ball(build_domain(ShapeSpec::unit_square(), 0.25), 0.0), Error);
}
