#include <gtest/gtest.h>

#include <cmath>

#include "graphheat/fixtures.hpp"
#include "graphheat/heat_kernel.hpp"
#include "graphheat/model_tree.hpp"
#include "graphheat/montecarlo.hpp"

using namespace graphheat;
namespace fx = graphheat::fixtures;

namespace {

WalkConfig config(VertexId source, double t, int radius, std::uint64_t seed, std::uint64_t trials = 100000) {
  WalkConfig c;
  c.source = source;
  c.t = t;
  c.radius = radius;
  c.seed = seed;
  c.trials = trials;
  return c;
}

double sigma(double p, std::uint64_t n) { return std::sqrt(p * (1 - p) / static_cast<double>(n)); }

double kernel_mass(const RootedGraph& g, int r, VertexId x, double t) {
  const double times[] = {t};
  return dirichlet_kernel(assemble_dirichlet(g, ball(g, r)), x, times).mass(t);
}

}  // namespace

TEST(MonteCarlo, TimeZeroSurvives) {
  const auto g = fx::path(5, 2);
  const auto est = survival_estimate(g, config(2, 0.0, 1, 1, 5000));
  EXPECT_EQ(est.p_hat, 1.0);
  EXPECT_EQ(est.censored, 0u);
}

TEST(MonteCarlo, SingleInteriorVertex) {
  const auto g = fx::path(5, 2);
  const auto est = survival_estimate(g, config(2, 1.0, 1, 7));
  const double p = std::exp(-2.0);
  EXPECT_LE(std::abs(est.p_hat - p), 3 * sigma(p, est.trials));
}

TEST(MonteCarlo, BinaryTreeAgainstKernel) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 9);
  const double p = kernel_mass(g, 8, g.root(), 1.0);
  const auto est = survival_estimate(g, config(g.root(), 1.0, 8, 3));
  EXPECT_LE(std::abs(est.p_hat - p), 3 * sigma(p, est.trials));
}

TEST(MonteCarlo, ImplicitTreeAgainstRadialMass) {
  const ModelTree tree(ModelTreeSpec::constant(3));
  const double t[] = {0.7};
  const double p = radial_mass(tree.spec(), 6, t)[0];
  const auto est = survival_estimate(tree, config(tree.root(), 0.7, 6, 9));
  EXPECT_LE(std::abs(est.p_hat - p), 3 * sigma(p, est.trials));
}

TEST(MonteCarlo, K2Occupancy) {
  const auto g = fx::complete(2);
  const auto occ = occupancy_estimate(g, config(0, 1.0, 1, 2), {0, 1});
  const double same = (1 + std::exp(-2.0)) / 2, other = (1 - std::exp(-2.0)) / 2;
  EXPECT_LE(std::abs(occ.p_hat[0] - same), 3 * sigma(same, occ.trials));
  EXPECT_LE(std::abs(occ.p_hat[1] - other), 3 * sigma(other, occ.trials));
}

TEST(MonteCarlo, BoundaryTargetIsNeverOccupied) {
  const auto g = fx::cycle(12);
  const auto occ = occupancy_estimate(g, config(0, 2.0, 4, 5), {4, 8, 0});
  EXPECT_EQ(occ.p_hat[0], 0.0);
  EXPECT_EQ(occ.p_hat[1], 0.0);
  EXPECT_GT(occ.p_hat[2], 0.0);
}

TEST(MonteCarlo, SourceDominatesAtSmallTime) {
  const auto g = fx::grid(11, 11, 60);
  const auto occ = occupancy_estimate(g, config(60, 0.01, 4, 6), {60, 61});
  EXPECT_GT(occ.p_hat[0], 0.9);
  EXPECT_LT(occ.p_hat[1], 0.05);
}

TEST(MonteCarlo, BitReproducible) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 7);
  const auto a = survival_estimate(g, config(g.root(), 1.0, 6, 42, 20000));
  const auto b = survival_estimate(g, config(g.root(), 1.0, 6, 42, 20000));
  EXPECT_EQ(a.survivors, b.survivors);
  EXPECT_EQ(a.p_hat, b.p_hat);
  const auto c = survival_estimate(g, config(g.root(), 1.0, 6, 43, 20000));
  EXPECT_NE(a.survivors, c.survivors);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  const ModelTree tree(ModelTreeSpec::constant(2));
  auto cfg = config(tree.root(), 1.0, 6, 11, 30000);
  const auto one = survival_estimate(tree, cfg);
  for (unsigned threads : {2u, 3u, 8u}) {
    cfg.threads = threads;
    EXPECT_EQ(survival_estimate(tree, cfg).survivors, one.survivors);
  }
  const std::vector<VertexId> targets{tree.root(), tree_vertex(1, 0), tree_vertex(3, 5)};
  cfg.threads = 1;
  const auto o1 = occupancy_estimate(tree, cfg, targets);
  cfg.threads = 4;
  EXPECT_EQ(occupancy_estimate(tree, cfg, targets).p_hat, o1.p_hat);
}

TEST(MonteCarlo, MonotoneInTimeAndRadius) {
  const auto g = build_model_tree(ModelTreeSpec::constant(2), 9);
  double prev = 1.0;
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const auto est = survival_estimate(g, config(g.root(), t, 6, 100));
    EXPECT_LE(est.p_hat, prev + 3 * est.stderr_);
    prev = est.p_hat;
  }
  prev = 0.0;
  for (int r : {2, 4, 6, 8}) {
    const auto est = survival_estimate(g, config(g.root(), 1.0, r, 200));
    EXPECT_GE(est.p_hat, prev - 3 * est.stderr_);
    prev = est.p_hat;
  }
}

TEST(MonteCarlo, StepCapCensorsWalks) {
  const auto g = fx::cycle(10);
  auto cfg = config(0, 50.0, 5, 1, 2000);
  cfg.step_cap = 10;
  const auto est = survival_estimate(g, cfg);
  EXPECT_EQ(est.censored, est.trials);
  EXPECT_EQ(est.p_hat, 1.0);
}

TEST(MonteCarlo, BoundedRateSurvivesLonger) {
  const ModelTree geo(ModelTreeSpec::geometric(2));
  auto phys = config(geo.root(), 1.0, 4, 3, 20000);
  auto bd = phys;
  bd.rate = WalkRate::bounded;
  EXPECT_GT(survival_estimate(geo, bd).p_hat, survival_estimate(geo, phys).p_hat);
}

TEST(MonteCarlo, RejectsBadConfigs) {
  const auto g = fx::path(6, 0);
  EXPECT_THROW(survival_estimate(g, config(2, 1.0, 2, 1)), PreconditionError);
  EXPECT_THROW(survival_estimate(g, config(0, -1.0, 2, 1)), PreconditionError);
  EXPECT_THROW(survival_estimate(g, config(0, 1.0, 2, 1, 0)), PreconditionError);
  const auto tree = build_model_tree(ModelTreeSpec::constant(2), 4);
  EXPECT_THROW(survival_estimate(tree, config(tree.root(), 1.0, 5, 1)), HorizonError);
}
