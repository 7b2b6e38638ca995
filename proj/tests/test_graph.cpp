#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "graphheat/fixtures.hpp"
#include "graphheat/graph.hpp"
#include "graphheat/model_tree.hpp"
#include "oracles.hpp"

using namespace graphheat;
namespace fx = graphheat::fixtures;

namespace {

std::vector<std::size_t> sphere_sizes(const RootedGraph& g) {
  std::vector<std::size_t> out;
  for (int r = 0; r <= g.eccentricity(); ++r) out.push_back(g.sphere_indices(r).size());
  return out;
}

std::vector<VertexId> sorted(std::vector<VertexId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(ModelTree, UnaryBranchingIsARay) {
  const auto g = build_model_tree(ModelTreeSpec::constant(1), 3);
  EXPECT_EQ(g.graph().size(), 4u);
  EXPECT_EQ(g.graph().edge_count(), 3u);
  EXPECT_EQ(sphere_sizes(g), (std::vector<std::size_t>{1, 1, 1, 1}));
}

TEST(ModelTree, BinaryDepthTwoHasSevenVertices) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 2);
  EXPECT_EQ(g.graph().size(), 7u);
  EXPECT_EQ(g.horizon(), 1);
}

TEST(ModelTree, GeometricSphereSizes) {
  const auto g = build_model_tree(ModelTreeSpec::geometric(2), 3);
  EXPECT_EQ(sphere_sizes(g), (std::vector<std::size_t>{1, 2, 8, 64}));
}

TEST(ModelTree, VertexCapIsEnforced) {
  EXPECT_THROW(build_model_tree(ModelTreeSpec::geometric(2), 8, 1e6), CapError);
}

TEST(ModelTree, RoundTripRecoversBranching) {
  const std::vector<ModelTreeSpec> specs{ModelTreeSpec::constant(2), ModelTreeSpec::constant(3),
                                         ModelTreeSpec::geometric(2), ModelTreeSpec::polynomial(1),
                                         ModelTreeSpec::polynomial(2), ModelTreeSpec::list({3, 1, 4, 1, 5})};
  for (const auto& spec : specs) {
    const int depth = spec.kind == ModelTreeSpec::Kind::geometric ? 4 : 5;
    const auto g = build_model_tree(spec, depth);
    for (int r = 1; r < depth; ++r) {
      const auto s = sphere_stats(g, r);
      ASSERT_TRUE(s) << spec.describe();
      EXPECT_EQ(static_cast<double>(s->min_out), spec.n(r)) << spec.describe() << " r=" << r;
      EXPECT_EQ(static_cast<double>(s->max_valence), spec.n(r) + 1) << spec.describe() << " r=" << r;
      EXPECT_EQ(s->max_in, 1u);
      const auto model = model_sphere_stats(spec, r);
      EXPECT_EQ(model.min_out, s->min_out);
      EXPECT_EQ(model.max_valence, s->max_valence);
      EXPECT_EQ(model.size, s->size);
    }
  }
}

TEST(Ball, RayBallInteriorAndBoundary) {
  const auto g = fx::path(4, 0);
  const auto b = ball(g, 2);
  EXPECT_EQ(sorted(b.all), (std::vector<VertexId>{0, 1, 2}));
  EXPECT_EQ(sorted(b.interior), (std::vector<VertexId>{0, 1}));
  EXPECT_EQ(b.boundary, (std::vector<VertexId>{2}));
}

TEST(Ball, WholeFiniteGraphHasNoBoundary) {
  const auto b = ball(fx::complete(2), 1);
  EXPECT_TRUE(b.boundary.empty());
  EXPECT_EQ(b.interior.size(), 2u);
}

TEST(Ball, BinaryTreeBoundaryIsTheSphere) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 4);
  const auto b = ball(g, 2);
  EXPECT_EQ(b.size(), 7u);
  EXPECT_EQ(b.boundary.size(), 4u);
  for (auto v : b.boundary) EXPECT_EQ(g.distance(v), 2);
}

TEST(Ball, IndexIsSortedByDistanceThenId) {
  const auto g = fx::random_connected(120, 40, 9);
  const auto b = ball(g, 3);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_EQ(b.index_of(b.all[i]), i);
    if (i > 0) EXPECT_TRUE(std::pair(b.dist[i - 1], b.all[i - 1]) < std::pair(b.dist[i], b.all[i]));
  }
}

TEST(Ball, HorizonIsEnforced) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 5);
  EXPECT_EQ(g.horizon(), 4);
  EXPECT_NO_THROW(ball(g, 4));
  EXPECT_THROW(ball(g, 5), HorizonError);
}

TEST(Ball, NestingProperty) {
  for (const auto& f : fx::kernel_fixtures()) {
    const auto& g = f.graph;
    for (int r = 0; r + 1 <= std::min(g.horizon(), 6); ++r) {
      const auto small = ball(g, r), big = ball(g, r + 1);
      for (auto v : small.all) {
        EXPECT_TRUE(big.contains(v)) << f.name;
        EXPECT_TRUE(big.is_interior(v)) << f.name << " r=" << r;
      }
    }
  }
}

TEST(Ball, InteriorMeansEveryNeighborInside) {
  for (const auto& f : fx::kernel_fixtures()) {
    const auto b = ball(f.graph, f.radius);
    for (auto v : b.all) {
      bool inside = true;
      for (auto w : f.graph.graph().neighbors(v)) inside = inside && b.contains(w);
      EXPECT_EQ(b.is_interior(v), inside) << f.name;
    }
  }
}

TEST(SphereStats, ConstantTreeOfThree) {
  const auto g = build_model_tree(ModelTreeSpec::constant(3), 4);
  const auto s = sphere_stats(g, 2);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->max_valence, 4u);
  EXPECT_EQ(s->min_out, 3u);
  EXPECT_EQ(s->max_in, 1u);
}

TEST(SphereStats, Ray) {
  const auto g = build_model_tree(ModelTreeSpec::constant(1), 10);
  for (int r = 1; r < 9; ++r) {
    const auto s = sphere_stats(g, r);
    EXPECT_EQ(s->max_valence, 2u);
    EXPECT_EQ(s->min_out, 1u);
    EXPECT_EQ(s->max_in, 1u);
  }
}

TEST(SphereStats, GeometricFirstSphere) {
  const auto s = sphere_stats(build_model_tree(ModelTreeSpec::geometric(2), 3), 1);
  EXPECT_EQ(s->min_out, 4u);
  EXPECT_EQ(s->max_in, 1u);
}

TEST(SphereStats, SameSphereEdgesCounted) {
  const auto g = fx::binary_with_sphere_edges(5);
  EXPECT_EQ(sphere_stats(g, 3)->same_sphere_edges, 8u);
  EXPECT_EQ(sphere_stats(g, 3)->min_out, 2u);
}

TEST(Attach, PendantVertexRaisesRootValence) {
  const auto h = build_model_tree(ModelTreeSpec::constant(2), 2);
  const auto hc = Graph::from_edges({0}, {});
  const auto g = attach_at_vertex(h, hc, h.root());
  EXPECT_EQ(g.degree(g.root()), h.degree(h.root()) + 1);
  for (auto v : h.graph().vertices())
    if (v != h.root()) EXPECT_EQ(g.degree(v), h.degree(v));
  EXPECT_TRUE(g.has_partition());
}

TEST(Attach, HRestrictedStatsUnchanged) {
  const auto h = build_model_tree(ModelTreeSpec::geometric(2), 4);
  std::vector<Edge> ray;
  for (VertexId i = 0; i + 1 < 5; ++i) ray.emplace_back(i, i + 1);
  const auto g = attach_at_vertex(h, Graph::from_edges(fx::iota(5), ray), h.root());
  for (int r = 1; r < 4; ++r) {
    const auto before = sphere_stats(h, r);
    const auto after = sphere_stats(g, r, Side::h);
    EXPECT_EQ(before->min_out, after->min_out);
    EXPECT_EQ(before->max_in, after->max_in);
  }
}

TEST(Attach, NonRootJunctionRejected) {
  const auto h = build_model_tree(ModelTreeSpec::constant(2), 2);
  const auto hc = Graph::from_edges({0}, {});
  EXPECT_THROW(attach_at_vertex(h, hc, h.graph().vertices().back()), PreconditionError);
}

TEST(GraphCore, RejectsLoopsAndMultiEdges) {
  EXPECT_THROW(Graph::from_edges({0, 1}, std::vector<Edge>{{0, 0}}), PreconditionError);
  EXPECT_THROW(Graph::from_edges({0, 1}, std::vector<Edge>{{0, 1}, {1, 0}}), PreconditionError);
}

TEST(GraphCore, HandshakeOnBalls) {
  // Valences summed over a ball against edges counted from the edge list.
  for (const auto& f : fx::kernel_fixtures()) {
    const auto b = ball(f.graph, f.radius);
    std::size_t valence_sum = 0, inside = 0, leaving = 0;
    for (auto v : b.all) valence_sum += f.graph.degree(v);
    for (const auto& [u, v] : f.graph.graph().edges()) {
      const int k = b.contains(u) + b.contains(v);
      inside += k == 2;
      leaving += k == 1;
    }
    EXPECT_EQ(valence_sum, 2 * inside + leaving) << f.name;
  }
  std::size_t total = 0;
  const auto g = fx::random_connected(300, 80, 2);
  for (auto v : g.graph().vertices()) total += g.degree(v);
  EXPECT_EQ(total, 2 * g.graph().edge_count());
}

TEST(GraphCore, DistancesMatchFloydWarshall) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto g = fx::random_connected(150, 60, seed);
    const std::vector<VertexId> vertices(g.graph().vertices().begin(), g.graph().vertices().end());
    const auto ref = oracle::distances_from(vertices, g.graph().edges(), g.root());
    for (auto v : vertices) EXPECT_EQ(g.distance(v), ref.at(v));
    for (const auto& [u, v] : g.graph().edges()) EXPECT_LE(std::abs(g.distance(u) - g.distance(v)), 1);
  }
  const auto grid = fx::grid(20, 20, 210);
  const std::vector<VertexId> vertices(grid.graph().vertices().begin(), grid.graph().vertices().end());
  const auto ref = oracle::distances_from(vertices, grid.graph().edges(), 210);
  for (auto v : vertices) EXPECT_EQ(grid.distance(v), ref.at(v));
}

TEST(GraphCore, ImplicitTreeMatchesMaterializedTree) {
  for (const auto& spec : {ModelTreeSpec::constant(2), ModelTreeSpec::geometric(2), ModelTreeSpec::polynomial(1)}) {
    const ModelTree implicit(spec);
    const auto g = build_model_tree(spec, 4);
    for (auto v : g.graph().vertices()) {
      if (g.distance(v) >= 4) continue;
      EXPECT_EQ(implicit.distance(v), g.distance(v));
      ASSERT_EQ(implicit.degree(v), g.degree(v));
      std::vector<VertexId> a, b = g.graph().neighbors(v);
      for (std::size_t k = 0; k < implicit.degree(v); ++k) a.push_back(implicit.neighbor(v, k));
      EXPECT_EQ(sorted(a), sorted(b));
      EXPECT_EQ(implicit.out_degree(v), g.out_degree(v));
    }
  }
}

TEST(GraphCore, RerootKeepsGraph) {
  const auto g = fx::grid(5, 5, 0);
  const auto h = g.rerooted(12, std::nullopt);
  EXPECT_EQ(h.root(), 12u);
  EXPECT_EQ(h.distance(0), 4);
  EXPECT_EQ(h.eccentricity(), 4);
}
