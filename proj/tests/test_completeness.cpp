#include <gtest/gtest.h>

#include <cmath>

#include "graphheat/completeness.hpp"
#include "graphheat/fixtures.hpp"
#include "oracles.hpp"

using namespace graphheat;
namespace fx = graphheat::fixtures;

namespace {

const CriterionReport& find(const std::vector<CriterionReport>& reports, CriterionKind k) {
  for (const auto& r : reports)
    if (r.kind == k) return r;
  throw std::runtime_error("criterion missing");
}

}  // namespace

TEST(Criteria, ConstantTreesAreComplete) {
  for (std::uint64_t k : {1u, 2u, 3u}) {
    const auto g = build_model_tree(ModelTreeSpec::constant(k), 6);
    const auto reports = criterion_sums(g, 12);
    EXPECT_EQ(find(reports, CriterionKind::max_valence_divergence).verdict, Verdict::complete_certified);
    EXPECT_EQ(find(reports, CriterionKind::ratio_convergence).verdict, Verdict::inconclusive);
    EXPECT_EQ(find(reports, CriterionKind::model_iff).verdict, Verdict::complete_certified);
    EXPECT_EQ(combine(reports), Verdict::complete_certified);
    // Partial sums of 1/M(r) grow linearly.
    const auto& s = find(reports, CriterionKind::max_valence_divergence).partial_sums;
    EXPECT_NEAR(s.back() - s[s.size() - 2], 1.0 / static_cast<double>(k + 1), 1e-15);
  }
}

TEST(Criteria, GeometricRatioSumConverges) {
  const auto g = build_model_tree(ModelTreeSpec::geometric(2), 4);
  const auto reports = criterion_sums(g, 12);
  const auto& ratio = find(reports, CriterionKind::ratio_convergence);
  EXPECT_EQ(ratio.verdict, Verdict::incomplete_certified);
  ASSERT_TRUE(ratio.limit);
  // sum_{r>=1} 2^{-(r+1)} = 1/2.
  EXPECT_DOUBLE_EQ(*ratio.limit, 0.5);
  EXPECT_DOUBLE_EQ(ratio.partial_sums.front(), 0.25);
  EXPECT_LT(ratio.partial_sums.back(), *ratio.limit);
  EXPECT_EQ(find(reports, CriterionKind::max_valence_divergence).verdict, Verdict::inconclusive);
  EXPECT_EQ(combine(reports), Verdict::incomplete_certified);
}

TEST(Criteria, QuadraticUsesZetaTail) {
  const auto reports = criterion_sums(build_model_tree(ModelTreeSpec::polynomial(2), 4), 12);
  const auto& ratio = find(reports, CriterionKind::ratio_convergence);
  ASSERT_TRUE(ratio.limit);
  EXPECT_NEAR(*ratio.limit, M_PI * M_PI / 6 - 1, 1e-14);
  EXPECT_EQ(combine(reports), Verdict::incomplete_certified);
}

TEST(Criteria, LinearTreeIsComplete) {
  const auto reports = criterion_sums(build_model_tree(ModelTreeSpec::polynomial(1), 6), 12);
  EXPECT_EQ(combine(reports), Verdict::complete_certified);
}

TEST(Criteria, UntaggedGraphsAreNeverCertified) {
  const auto g = fx::random_tree(300, 4);
  const auto reports = criterion_sums(g, 12);
  for (const auto& r : reports) {
    EXPECT_EQ(r.verdict, Verdict::inconclusive);
    EXPECT_TRUE(r.tail_rule.empty());
  }
  // An explicit copy of a model tree carries no rule either.
  const auto tree = build_model_tree(ModelTreeSpec::geometric(2), 4);
  std::vector<VertexId> vertices(tree.graph().vertices().begin(), tree.graph().vertices().end());
  const auto copy = fx::make(vertices, tree.graph().edges(), tree.root());
  EXPECT_EQ(combine(criterion_sums(copy, 3)), Verdict::inconclusive);
}

TEST(Criteria, HorizonBeyondUntaggedGraphThrows) {
  const auto g = fx::binary_with_sphere_edges(5);
  EXPECT_THROW(criterion_sums(g, 12), HorizonError);
}

TEST(Criteria, AttachedGraphUsesHSide) {
  const auto g = fx::attached_example(4, 5);
  const auto reports = criterion_sums(g, 12);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].kind, CriterionKind::attached_subgraph);
  EXPECT_EQ(reports[0].verdict, Verdict::incomplete_certified);
}

TEST(Subharmonic, GeometricFirstValues) {
  const auto g = build_model_tree(ModelTreeSpec::geometric(2), 4);
  const auto f = build_subharmonic(g, -1.0, 1.0, 12);
  ASSERT_GE(f.radial.size(), 3u);
  EXPECT_DOUBLE_EQ(f.radial[1], 1.5);
  EXPECT_DOUBLE_EQ(f.radial[2], 2.0);
  EXPECT_TRUE(f.positive);
  EXPECT_TRUE(f.bounded_certified);
  EXPECT_LE(f.sup, f.global_bound);
  EXPECT_LE(f.residual_max, 1e-9);
}

TEST(Subharmonic, RayIsUnbounded) {
  const auto g = build_model_tree(ModelTreeSpec::constant(1), 60);
  const auto f = build_subharmonic(g, -1.0, 1.0, 50);
  EXPECT_FALSE(f.bounded_certified);
  EXPECT_GT(f.sup, 1e10);
  for (std::size_t r = 1; r < f.radial.size(); ++r) EXPECT_GT(f.radial[r], f.radial[r - 1]);
}

TEST(Subharmonic, RandomListRules) {
  fx::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint64_t> values(6);
    for (auto& v : values) v = 1 + rng.below(4);
    const auto spec = ModelTreeSpec::list(values);
    const auto g = build_model_tree(spec, 5);
    for (double lambda : {-0.25, -1.0, -4.0}) {
      const auto f = build_subharmonic(g, lambda, 1.0, 5);
      EXPECT_TRUE(f.positive) << spec.describe();
      EXPECT_LE(f.residual_max, 1e-9) << spec.describe();
      EXPECT_LE(f.sup, f.horizon_bound * (1 + 1e-12)) << spec.describe();
      for (std::size_t r = 1; r < f.radial.size(); ++r) EXPECT_GE(f.radial[r], f.radial[r - 1]);
    }
  }
}

TEST(Subharmonic, RejectsNonNegativeLambda) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 4);
  EXPECT_THROW(build_subharmonic(g, 0.0, 1.0, 3), PreconditionError);
  EXPECT_THROW(build_subharmonic(g, -1.0, 0.0, 3), PreconditionError);
}

TEST(BoundaryProblems, PathMiddleVertex) {
  const auto g = fx::path(5, 2);
  const auto f = solve_dirichlet_lambda(g, ball(g, 1), -1.0);
  EXPECT_NEAR(f.value(2), 2.0 / 3.0, 1e-15);
}

TEST(BoundaryProblems, StarCenter) {
  for (std::size_t k = 2; k <= 6; ++k) {
    const auto g = fx::spider(k, 2);
    const auto f = solve_dirichlet_lambda(g, ball(g, 1), -1.0);
    EXPECT_NEAR(f.value(0), static_cast<double>(k) / static_cast<double>(k + 1), 1e-15);
  }
}

TEST(BoundaryProblems, ExceptionalSolutionOnPath) {
  const auto g = fx::path(7, 3);
  const auto f = solve_exception(g, ball(g, 2), -1.0);
  EXPECT_EQ(f.value(3), 1.0);
  EXPECT_NEAR(f.value(2), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(f.value(4), 1.0 / 3.0, 1e-15);
}

TEST(BoundaryProblems, MatchGaussianElimination) {
  const auto g = fx::random_connected(200, 50, 12);
  const auto b = ball(g, 3);
  const double lambda = -0.5;
  const auto f = solve_dirichlet_lambda(g, b, lambda);
  // Independent system: (m(x) - lambda) v(x) - sum_{y ~ x, y interior} v(y) = #(boundary neighbors).
  const auto& rows = b.interior;
  std::map<VertexId, std::size_t> pos;
  for (std::size_t i = 0; i < rows.size(); ++i) pos[rows[i]] = i;
  std::vector<std::vector<double>> a(rows.size(), std::vector<double>(rows.size(), 0.0));
  std::vector<double> rhs(rows.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto nb = g.graph().neighbors(rows[i]);
    a[i][i] = static_cast<double>(nb.size()) - lambda;
    for (auto y : nb) {
      if (pos.count(y)) a[i][pos[y]] -= 1.0;
      else rhs[i] += 1.0;
    }
  }
  const auto ref = oracle::gauss_solve(a, rhs);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(f.value(rows[i]), ref[i], 1e-12);
}

TEST(BoundaryProblems, MonotoneInRadius) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 9);
  for (double lambda : {-0.25, -4.0}) {
    std::optional<LambdaFunction> pd, pe;
    std::optional<BallRestriction> pb;
    for (int r = 2; r <= 7; ++r) {
      const auto b = ball(g, r);
      const auto d = solve_dirichlet_lambda(g, b, lambda);
      const auto e = solve_exception(g, b, lambda);
      if (pb)
        for (auto v : pb->all) {
          EXPECT_LE(d.value(v), pd->value(v) + 1e-12);
          EXPECT_GE(e.value(v), pe->value(v) - 1e-12);
        }
      pb = b;
      pd = d;
      pe = e;
    }
  }
}

TEST(BoundaryProblems, ExceptionOnFiniteGraphWithoutBoundary) {
  const auto g = fx::cycle(8);
  const auto b = ball(g, 4);
  ASSERT_TRUE(b.boundary.empty());
  const auto f = solve_exception(g, b, -1.0);
  EXPECT_LE(f.residual_max, 1e-12);
  EXPECT_NEAR(f.value(1), f.value(7), 1e-14);
  EXPECT_THROW(solve_dirichlet_lambda(g, b, -1.0), PreconditionError);
}

TEST(Witness, AttachedCycle) {
  const auto g = fx::attached_example(4, 5);
  for (double lambda : {-0.25, -1.0, -4.0}) {
    const auto w = incompleteness_witness_attached(g, lambda, 12);
    ASSERT_FALSE(w.refused) << w.refusal;
    EXPECT_TRUE(w.positive);
    EXPECT_LE(w.residual_max, 1e-9);
    EXPECT_LE(w.sup, w.global_bound * (1 + 1e-12));
  }
}

TEST(Witness, AttachedToCompleteTreeIsRefused) {
  const auto h = build_model_tree(ModelTreeSpec::constant(2), 6);
  std::vector<Edge> e;
  for (VertexId i = 0; i < 5; ++i) e.emplace_back(i, (i + 1) % 5);
  const auto g = attach_at_vertex(h, Graph::from_edges(fx::iota(5), e), h.root());
  const auto w = incompleteness_witness_attached(g, -1.0, 12);
  EXPECT_TRUE(w.refused);
}

TEST(Verdict, ModelTrees) {
  EXPECT_EQ(completeness_verdict(build_model_tree(ModelTreeSpec::constant(2), 11)).verdict,
            Verdict::complete_certified);
  const auto geo = completeness_verdict(build_model_tree(ModelTreeSpec::geometric(2), 5));
  EXPECT_EQ(geo.verdict, Verdict::incomplete_certified);
  EXPECT_TRUE(geo.consistent);
  EXPECT_TRUE(geo.numeric_incompleteness);
  EXPECT_FALSE(geo.witnesses.empty());
  for (const auto& w : geo.witnesses) EXPECT_TRUE(w.bounded_certified);
}

TEST(Verdict, RandomTreeIsInconclusive) {
  const auto cert = completeness_verdict(fx::random_tree(400, 7));
  EXPECT_EQ(cert.verdict, Verdict::inconclusive);
}

TEST(Verdict, TailRuleHelpers) {
  EXPECT_TRUE(tail_facts(ModelTreeSpec::constant(3)).inverse_max_diverges);
  EXPECT_FALSE(tail_facts(ModelTreeSpec::constant(3)).ratio_converges);
  EXPECT_DOUBLE_EQ(*tail_facts(ModelTreeSpec::geometric(3)).ratio_limit, 1.0 / 6.0);
  EXPECT_TRUE(std::isinf(inverse_branching_tail(ModelTreeSpec::constant(2), 5)));
  // sum_{i>5} 2^{-(i+1)} = 2^{-6}.
  EXPECT_NEAR(inverse_branching_tail(ModelTreeSpec::geometric(2), 5), 1.0 / 64, 1e-15);
}
