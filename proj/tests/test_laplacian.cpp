#include <gtest/gtest.h>

#include <sstream>

#include <Eigen/Eigenvalues>

#include "graphheat/fixtures.hpp"
#include "graphheat/laplacian.hpp"
#include "graphheat/model_tree.hpp"
#include "oracles.hpp"

using namespace graphheat;
namespace fx = graphheat::fixtures;

TEST(Dirichlet, SingleInteriorVertexBetweenBoundaryVertices) {
  // B_1 around the middle of a 5-vertex path is the path 1 - 2 - 3 with interior {2}.
  const auto g = fx::path(5, 2);
  const auto b = ball(g, 1);
  ASSERT_EQ(b.interior, (std::vector<VertexId>{2}));
  const auto op = assemble_dirichlet(g, b);
  ASSERT_EQ(op.size(), 1u);
  EXPECT_EQ(op.to_dense()(0, 0), 2.0);
}

TEST(Dirichlet, K2IsTheFullLaplacian) {
  const auto g = fx::complete(2);
  const auto op = assemble_dirichlet(g, ball(g, 1));
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(op.to_dense(), expected);
}

TEST(Dirichlet, StarCenterWithThreeBoundaryLeaves) {
  // Legs of length 2 put the three leaves of B_1 on the boundary.
  const auto g = fx::spider(3, 2);
  const auto b = ball(g, 1);
  ASSERT_EQ(b.interior, (std::vector<VertexId>{0}));
  const auto op = assemble_dirichlet(g, b);
  EXPECT_EQ(op.to_dense()(0, 0), 3.0);
}

TEST(Dirichlet, MatchesIndependentDenseAssembly) {
  for (const auto& f : fx::kernel_fixtures()) {
    const auto b = ball(f.graph, f.radius);
    if (b.size() > 200) continue;
    const auto op = assemble_dirichlet(f.graph, b);
    const auto ref = oracle::restricted_laplacian(f.graph.graph().edges(), op.active);
    EXPECT_EQ((op.to_dense() - ref).cwiseAbs().maxCoeff(), 0.0) << f.name;
  }
}

TEST(Dirichlet, SparseAndDenseStorageAgree) {
  const auto g = fx::grid(15, 15, 112);
  const auto b = ball(g, 6);
  const auto dense = assemble_dirichlet(g, b);
  const auto sparse = assemble_dirichlet(g, b, LaplacianKind::physical, 10);
  EXPECT_TRUE(dense.dense.has_value());
  EXPECT_FALSE(sparse.dense.has_value());
  EXPECT_EQ((dense.to_dense() - sparse.to_dense()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dirichlet, SpectrumSigns) {
  for (const auto& f : fx::kernel_fixtures()) {
    const auto b = ball(f.graph, f.radius);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_dirichlet(f.graph, b).to_dense());
    EXPECT_GT(es.eigenvalues()(0), 0.0) << f.name;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bd(
        assemble_dirichlet(f.graph, b, LaplacianKind::bounded).to_dense());
    EXPECT_GE(bd.eigenvalues()(0), -1e-10) << f.name;
    EXPECT_LE(bd.eigenvalues().maxCoeff(), 2.0 + 1e-10) << f.name;
  }
  // Empty boundary: eigenvalue 0 with a constant eigenvector.
  const auto g = fx::cycle(9);
  const auto b = ball(g, 4);
  ASSERT_TRUE(b.boundary.empty());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_dirichlet(g, b).to_dense());
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-12);
  const Eigen::VectorXd v = es.eigenvectors().col(0);
  EXPECT_NEAR(v.maxCoeff() - v.minCoeff(), 0.0, 1e-12);
}

TEST(Dirichlet, BoundedKindIsSymmetrizedNormalization) {
  const auto g = fx::random_connected(80, 30, 5);
  const auto b = ball(g, 2);
  const auto phys = assemble_dirichlet(g, b).to_dense();
  const auto bd = assemble_dirichlet(g, b, LaplacianKind::bounded).to_dense();
  const auto op = assemble_dirichlet(g, b);
  Eigen::VectorXd d(static_cast<Eigen::Index>(op.size()));
  for (std::size_t i = 0; i < op.size(); ++i) d[static_cast<Eigen::Index>(i)] = 1.0 / std::sqrt(op.valence[i]);
  const Eigen::MatrixXd expected = d.asDiagonal() * phys * d.asDiagonal();
  EXPECT_LT((bd - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Complement, EmptyRemovalEqualsDirichlet) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 6);
  const auto b = ball(g, 4);
  const auto a = assemble_complement(g, {}, b);
  EXPECT_EQ(a.to_dense(), assemble_dirichlet(g, b).to_dense());
  EXPECT_FALSE(a.upper_bound);
}

TEST(Complement, RayWithoutRoot) {
  const auto g = fx::path(8, 0);
  const auto b = ball(g, 3);
  const std::vector<VertexId> a{0};
  const auto op = assemble_complement(g, a, b);
  EXPECT_EQ(op.active, (std::vector<VertexId>{1, 2}));
  Eigen::MatrixXd expected(2, 2);
  expected << 2, -1, -1, 2;
  EXPECT_EQ(op.to_dense(), expected);
  EXPECT_TRUE(op.upper_bound);
}

TEST(Complement, BinaryTreeWithoutFirstBall) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 5);
  const auto b = ball(g, 3);
  const auto a = ball(g, 1).all;
  const auto op = assemble_complement(g, a, b);
  std::vector<VertexId> s2;
  for (auto i : g.sphere_indices(2)) s2.push_back(g.graph().id(i));
  EXPECT_EQ(op.active, s2);
}

TEST(Complement, RemovedVertexOutsideBallRejected) {
  const auto g = fx::path(8, 0);
  const std::vector<VertexId> a{6};
  EXPECT_THROW(assemble_complement(g, a, ball(g, 3)), PreconditionError);
}

TEST(Green, ConstantFunctionsGiveZero) {
  const auto g = fx::grid(7, 7, 24);
  const auto b = ball(g, 2);
  const auto r = green_identity_check(g, b, [](VertexId) { return 3.0; }, [](VertexId) { return 3.0; });
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(Green, VanishingOnBoundaryGivesEnergyForm) {
  // Integer-valued f, h with h = 0 on the boundary of a ~50-vertex ball.
  const auto g = fx::random_connected(400, 60, 3);
  int r = 1;
  while (ball(g, r + 1).size() <= 60) ++r;
  const auto b = ball(g, r);
  fx::Rng rng(17);
  std::unordered_map<VertexId, double> f, h;
  for (auto v : g.graph().vertices()) {
    f[v] = static_cast<double>(rng.below(21)) - 10;
    h[v] = b.contains(v) && b.is_interior(v) ? static_cast<double>(rng.below(21)) - 10 : 0.0;
  }
  const auto res = green_identity_check(g, b, [&](VertexId v) { return f[v]; }, [&](VertexId v) { return h[v]; });
  double lap_h = 0, energy = 0;
  for (auto x : b.all) lap_h += apply_laplacian(g, x, [&](VertexId v) { return f[v]; }) * h[x];
  for (const auto& [u, v] : g.graph().edges())
    if (b.contains(u) && b.contains(v)) energy += (f[u] - f[v]) * (h[u] - h[v]);
  EXPECT_LT(res.residual, 1e-12);
  EXPECT_EQ(res.lhs, lap_h);
  EXPECT_EQ(lap_h, energy);
}

TEST(Green, RandomRealFunctions) {
  fx::Rng rng(99);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = fx::random_connected(30, 1 + rng.below(30), 1000 + static_cast<std::uint64_t>(trial));
    const int r = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(std::max(1, g.horizon() - 1))));
    const auto b = ball(g, std::min(r, g.horizon()));
    std::vector<double> f(30), h(30);
    for (auto& x : f) x = rng.uniform() * 2 - 1;
    for (auto& x : h) x = rng.uniform() * 2 - 1;
    const auto res = green_identity_check(g, b, [&](VertexId v) { return f[v]; }, [&](VertexId v) { return h[v]; });
    worst = std::max(worst, res.relative());
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(MatrixMarket, WritesLowerTriangle) {
  const auto g = fx::path(7, 3);
  const auto op = assemble_dirichlet(g, ball(g, 2));
  std::ostringstream os;
  write_matrix_market(op, os);
  const auto text = os.str();
  EXPECT_EQ(text.rfind("%%MatrixMarket matrix coordinate real symmetric", 0), 0u);
  EXPECT_NE(text.find("3 3 5"), std::string::npos);
}
