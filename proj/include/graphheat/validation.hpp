#ifndef GRAPHHEAT_VALIDATION_HPP
#define GRAPHHEAT_VALIDATION_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphheat/completeness.hpp"
#include "graphheat/fixtures.hpp"
#include "graphheat/heat_kernel.hpp"
#include "graphheat/laplacian.hpp"
#include "graphheat/model_tree.hpp"
#include "graphheat/montecarlo.hpp"
#include "graphheat/spectrum.hpp"

// The acceptance suite: ten checks with fixed fixtures, tolerances and time
// budgets. Shared by the acceptance test binary and `graphheat validate`.
namespace graphheat::validation {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = true;
  double seconds = 0;
  double budget_seconds = 0;
  std::vector<std::string> details;  // failures first, then a summary line

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      details.insert(details.begin(), "FAILED: " + what);
    }
  }
  void note(const std::string& what) { details.push_back(what); }
};

/// Mass of n(r) = 2^(r+1) at t = 1 in the radius-24 ball, from the first
/// run of the radial pipeline. Kept as a regression anchor.
inline constexpr double kGeometricMassAnchor = 0.49204683126102469;
inline constexpr double kGeometricAnchorTolerance = 1e-9;

inline std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline std::string fmt_anchor(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Independent oracles.

namespace oracle {

/// p_t(src, .) by uniformization: exp(-tA) = e^{-Lt} sum_k (Lt)^k/k! P^k with
/// P = I - A/L entrywise non-negative, so no cancellation occurs and every
/// reachable entry comes out strictly positive.
inline Eigen::VectorXd uniformized_row(const Eigen::MatrixXd& a, Eigen::Index src, double t) {
  const Eigen::Index n = a.rows();
  const double lam = std::max(a.diagonal().maxCoeff(), 1e-300);
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) - a / lam;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[src] = 1.0;
  double w = std::exp(-lam * t);
  Eigen::VectorXd acc = w * v;
  double total = w;
  for (int k = 1; k < 10000 && (total < 1.0 - 1e-17 || k < lam * t); ++k) {
    v = p * v;
    w *= lam * t / k;
    acc += w * v;
    total += w;
  }
  return acc;
}

/// Connected component of `source` inside the interior of a ball.
inline std::unordered_set<VertexId> interior_component(const RootedGraph& g, const BallRestriction& b,
                                                       VertexId source) {
  std::unordered_set<VertexId> seen{source};
  std::vector<VertexId> stack{source};
  const auto& graph = g.graph();
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (auto j : graph.neighbor_indices(graph.index_of(v))) {
      const VertexId w = graph.id(j);
      if (b.contains(w) && b.is_interior(w) && seen.insert(w).second) stack.push_back(w);
    }
  }
  return seen;
}

}  // namespace oracle

namespace detail {

template <class F>
CheckResult timed(int id, std::string name, double budget, F&& body) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  r.budget_seconds = budget;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.require(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.require(r.seconds < budget, "runtime " + num(r.seconds) + " s over budget " + num(budget) + " s");
  return r;
}

inline std::vector<VertexId> ball_ids(const RootedGraph& g, int r) {
  std::vector<VertexId> out;
  for (int d = 0; d <= r; ++d)
    for (auto i : g.sphere_indices(d)) out.push_back(g.graph().id(i));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1. Closed-form kernels.

inline CheckResult closed_form_kernels() {
  return detail::timed(1, "closed-form kernels", 1.0, [](CheckResult& res) {
    const auto k2 = fixtures::complete(2);
    const auto bk = ball(k2, 1);
    const auto opk = assemble_dirichlet(k2, bk);
    const double t1[] = {1.0};
    const double e2 = std::exp(-2.0);
    double worst = 0;
    for (auto method : {ExpmMethod::eigendecomposition, ExpmMethod::scaling_and_squaring}) {
      const auto p = dirichlet_kernel(opk, 0, t1, method);
      worst = std::max({worst, std::abs(p.value(1.0, 0) - (1 + e2) / 2), std::abs(p.value(1.0, 1) - (1 - e2) / 2)});
    }
    res.require(worst <= 1e-12, "K2 kernel error " + num(worst));

    // B_1 around the middle of a 5-vertex path: interior {2}, boundary {1, 3}.
    const auto path = fixtures::path(5, 2);
    const auto bp = ball(path, 1);
    const auto opp = assemble_dirichlet(path, bp);
    const std::vector<double> times{0.0, 0.1, 0.5, 1.0, 2.0, 5.0};
    double worst_path = 0;
    for (auto method : {ExpmMethod::eigendecomposition, ExpmMethod::scaling_and_squaring}) {
      const auto p = dirichlet_kernel(opp, 2, times, method);
      for (double t : times) worst_path = std::max(worst_path, std::abs(p.value(t, 2) - std::exp(-2 * t)));
    }
    res.require(worst_path <= 1e-12, "path kernel error " + num(worst_path));
    res.note("K2 error " + num(worst) + ", path error " + num(worst_path));
  });
}

// ---------------------------------------------------------------------------
// 2. Dirichlet kernel properties on the fixture set.

inline CheckResult dirichlet_kernel_properties() {
  return detail::timed(2, "Dirichlet kernel properties", 120.0, [](CheckResult& res) {
    const std::vector<double> times{0.25, 0.5, 0.75, 1.0, 1.75};
    double worst_sym = 0, worst_semi = 0, worst_agree = 0, worst_oracle = 0, max_mass = 0;
    int count = 0;
    for (const auto& fx : fixtures::kernel_fixtures()) {
      const auto& g = fx.graph;
      const auto b = ball(g, fx.radius);
      res.require(b.size() <= 1000, fx.name + " ball exceeds 1000 vertices");
      res.require(!b.boundary.empty(), fx.name + " has no boundary");
      const auto op = assemble_dirichlet(g, b);
      const VertexId x = g.root();
      const auto eig = dirichlet_kernel(op, x, times, ExpmMethod::eigendecomposition);
      const auto ss = dirichlet_kernel(op, x, times, ExpmMethod::scaling_and_squaring);

      for (std::size_t k = 0; k < times.size(); ++k)
        worst_agree = std::max(worst_agree, (eig.values[k] - ss.values[k]).lpNorm<Eigen::Infinity>());

      // Symmetry: the full spectral kernel, and one swapped pair by the action route.
      for (double t : times) {
        const auto full = dense_kernel(*eig.spectral, t);
        worst_sym = std::max(worst_sym, (full - full.transpose()).cwiseAbs().maxCoeff());
      }
      const VertexId y = b.interior.back();
      const auto ssy = dirichlet_kernel(op, y, times, ExpmMethod::scaling_and_squaring);
      for (double t : times) worst_sym = std::max(worst_sym, std::abs(ss.value(t, y) - ssy.value(t, x)));

      worst_semi = std::max({worst_semi, semigroup_check(op, eig, 0.5, 0.25), semigroup_check(op, eig, 0.75, 1.0),
                             semigroup_check(op, ss, 0.5, 0.25), semigroup_check(op, ss, 0.75, 1.0)});

      // Positivity and strict mass loss, certified by uniformization.
      const auto component = oracle::interior_component(g, b, x);
      const Eigen::MatrixXd a = op.to_dense();
      const auto src = static_cast<Eigen::Index>(*op.find(x));
      for (double t : times) {
        const Eigen::VectorXd u = oracle::uniformized_row(a, src, t);
        double flux = 0;
        for (std::size_t i = 0; i < op.size(); ++i) {
          const VertexId v = op.active[i];
          const double ui = u[static_cast<Eigen::Index>(i)];
          const double pi = eig.value(t, v);
          worst_oracle = std::max(worst_oracle, std::abs(ui - pi));
          if (component.count(v)) {
            if (!(ui > 0)) res.require(false, fx.name + ": p_t(x, " + std::to_string(v) + ") not positive");
          } else if (ui != 0) {
            res.require(false, fx.name + ": mass outside the source component");
          }
          if (pi < -1e-14) res.require(false, fx.name + ": negative kernel entry " + num(pi));
          for (auto j : g.graph().neighbor_indices(g.graph().index_of(v)))
            if (b.contains(g.graph().id(j)) && b.is_boundary(g.graph().id(j))) flux += ui;
        }
        const double m = eig.mass(t);
        max_mass = std::max(max_mass, m);
        res.require(m < 1.0, fx.name + ": mass " + num(m) + " not below 1 at t=" + num(t));
        res.require(flux > 0, fx.name + ": no boundary flux at t=" + num(t));
      }
      ++count;
    }
    res.require(count == 20, "expected 20 fixtures, ran " + std::to_string(count));
    res.require(worst_sym <= 1e-10, "symmetry " + num(worst_sym));
    res.require(worst_semi <= 1e-9, "semigroup residual " + num(worst_semi));
    res.require(worst_agree <= 1e-8, "eigendecomposition vs scaling-and-squaring " + num(worst_agree));
    res.require(worst_oracle <= 1e-10, "uniformization oracle " + num(worst_oracle));
    res.note(std::to_string(count) + " fixtures; symmetry " + num(worst_sym) + ", semigroup " + num(worst_semi) +
             ", method agreement " + num(worst_agree) + ", oracle " + num(worst_oracle) + ", max mass " +
             num(max_mass));
  });
}

// ---------------------------------------------------------------------------
// 3. Exhaustion monotonicity and convergence.

inline CheckResult exhaustion_convergence() {
  return detail::timed(3, "exhaustion monotonicity and convergence", 300.0, [](CheckResult& res) {
    const std::vector<double> times{0.5, 1.0, 2.0};

    // Binary tree: pointwise monotone, mass at t = 1 increasing past 0.999.
    const auto binary = build_model_tree(ModelTreeSpec::constant(2), 13);
    const std::vector<int> schedule{2, 4, 6, 8, 10, 12};
    const auto ex = exhaustion(binary, binary.root(), times, schedule);
    res.require(ex.worst_monotonicity >= -1e-10, "binary tree monotonicity " + num(ex.worst_monotonicity));
    const auto seq = ex.mass_sequence(1.0);
    for (std::size_t i = 1; i < seq.size(); ++i)
      res.require(seq[i] > seq[i - 1], "binary tree mass not increasing at radius " + std::to_string(schedule[i]));
    res.require(seq.back() > 0.999, "binary tree mass " + num(seq.back()) + " not above 0.999");
    res.require(ex.converged, "binary tree exhaustion not converged");

    // Monotonicity on a few more graphs, including a source off the root.
    double worst = ex.worst_monotonicity;
    const auto geometric_tree = build_model_tree(ModelTreeSpec::geometric(2), 5);
    const std::vector<int> small{1, 2, 3, 4};
    worst = std::min(worst, exhaustion(geometric_tree, geometric_tree.root(), times, small).worst_monotonicity);
    const auto grid = fixtures::grid(21, 21, 220);
    const std::vector<int> grid_radii{3, 5, 7, 9};
    worst = std::min(worst, exhaustion(grid, 221, times, grid_radii).worst_monotonicity);
    const auto rnd = fixtures::random_connected(600, 200, 11);
    const std::vector<int> rnd_radii{2, 3, 4, 5};
    worst = std::min(worst, exhaustion(rnd, rnd.root(), times, rnd_radii).worst_monotonicity);
    res.require(worst >= -1e-10, "monotonicity " + num(worst));

    // n(r) = 2^(r+1): radial masses stabilize strictly below 1.
    const auto spec = ModelTreeSpec::geometric(2);
    const std::vector<int> radial{8, 12, 16, 20, 24};
    const auto re = radial_exhaustion(spec, times, radial);
    std::vector<double> m1;
    for (const auto& m : re.masses) m1.push_back(m[1]);
    for (std::size_t i = 1; i < m1.size(); ++i)
      res.require(m1[i] >= m1[i - 1] - 1e-12, "geometric mass decreased at radius " + std::to_string(radial[i]));
    const double gap = m1.back() - m1[m1.size() - 2];
    res.require(gap < 1e-6, "geometric mass gap " + num(gap));
    res.require(m1.back() < 1.0 - 1e-3, "geometric mass " + num(m1.back()) + " not below 1 - 1e-3");
    res.require(std::abs(m1.back() - kGeometricMassAnchor) <= kGeometricAnchorTolerance,
                "geometric mass " + fmt_anchor(m1.back()) + " moved from anchor");

    // The radial reduction reproduces the materialized tree.
    double radial_vs_graph = 0;
    const auto ge = exhaustion(geometric_tree, geometric_tree.root(), times, small);
    for (std::size_t level = 0; level < small.size(); ++level) {
      const auto rm = radial_mass(spec, small[level], times);
      for (std::size_t k = 0; k < times.size(); ++k)
        radial_vs_graph = std::max(radial_vs_graph, std::abs(rm[k] - ge.masses[level][k]));
    }
    res.require(radial_vs_graph <= 1e-10, "radial vs materialized mass " + num(radial_vs_graph));
    res.note("binary mass(1) at r=12: " + num(seq.back()) + "; geometric mass(1) at r=24: " + num(m1.back()) +
             " (gap " + num(gap) + "); monotonicity " + num(worst) + "; radial vs graph " + num(radial_vs_graph));
  });
}

// ---------------------------------------------------------------------------
// 4. Completeness verdicts.

inline CheckResult completeness_verdicts() {
  return detail::timed(4, "completeness criteria", 10.0, [](CheckResult& res) {
    struct Case {
      std::string name;
      RootedGraph g;
      Verdict expected;
    };
    std::vector<Case> cases;
    cases.push_back({"ray (n=1)", build_model_tree(ModelTreeSpec::constant(1), 40), Verdict::complete_certified});
    cases.push_back({"binary (n=2)", build_model_tree(ModelTreeSpec::constant(2), 11), Verdict::complete_certified});
    cases.push_back({"ternary (n=3)", build_model_tree(ModelTreeSpec::constant(3), 8), Verdict::complete_certified});
    cases.push_back({"linear (n=r+1)", build_model_tree(ModelTreeSpec::polynomial(1), 7), Verdict::complete_certified});
    cases.push_back({"geometric 2^(r+1)", build_model_tree(ModelTreeSpec::geometric(2), 5), Verdict::incomplete_certified});
    cases.push_back({"geometric 3^(r+1)", build_model_tree(ModelTreeSpec::geometric(3), 4), Verdict::incomplete_certified});
    cases.push_back({"quadratic (r+1)^2", build_model_tree(ModelTreeSpec::polynomial(2), 4), Verdict::incomplete_certified});
    cases.push_back({"attached cycle", fixtures::attached_example(4, 5), Verdict::incomplete_certified});
    for (const auto& c : cases) {
      const auto cert = completeness_verdict(c.g);
      res.require(cert.verdict == c.expected,
                  c.name + ": verdict " + to_string(cert.verdict) + ", expected " + to_string(c.expected));
      res.require(cert.consistent, c.name + ": verdict inconsistent with numeric evidence");
      const bool incomplete = c.expected == Verdict::incomplete_certified;
      if (!c.g.has_partition())
        res.require(cert.numeric_incompleteness == incomplete, c.name + ": mass evidence disagrees with the verdict");
      res.note(c.name + ": " + to_string(cert.verdict));
    }
    // An explicit graph without a rule is never certified.
    const auto cert = completeness_verdict(fixtures::random_tree(400, 7));
    res.require(cert.verdict == Verdict::inconclusive, "untagged graph certified");
  });
}

// ---------------------------------------------------------------------------
// 5. Witness functions.

inline CheckResult witness_functions() {
  return detail::timed(5, "witness functions", 60.0, [](CheckResult& res) {
    const std::vector<double> lambdas{-0.25, -1.0, -4.0};
    double worst_sub = -std::numeric_limits<double>::infinity(), worst_residual = 0;
    const std::vector<RootedGraph> trees{build_model_tree(ModelTreeSpec::constant(2), 10),
                                         build_model_tree(ModelTreeSpec::constant(3), 9),
                                         build_model_tree(ModelTreeSpec::geometric(2), 5),
                                         build_model_tree(ModelTreeSpec::polynomial(2), 4)};
    for (const auto& g : trees)
      for (double lambda : lambdas) {
        const auto f = build_subharmonic(g, lambda, 1.0, 12);
        worst_sub = std::max(worst_sub, f.residual_max);
        res.require(f.positive, g.model()->describe() + ": witness not positive");
        res.require(f.sup <= f.horizon_bound * (1 + 1e-12), g.model()->describe() + ": witness above product bound");
        if (f.bounded_certified)
          res.require(f.sup <= f.global_bound * (1 + 1e-12), g.model()->describe() + ": witness above global bound");
        const bool summable = g.model()->kind != ModelTreeSpec::Kind::constant;
        res.require(f.bounded_certified == summable, g.model()->describe() + ": bound certification mismatch");
      }
    const auto attached = fixtures::attached_example(4, 5);
    for (double lambda : lambdas) {
      const auto w = incompleteness_witness_attached(attached, lambda, 12);
      res.require(!w.refused, "attached witness refused");
      worst_sub = std::max(worst_sub, w.residual_max);
      res.require(w.sup <= w.global_bound * (1 + 1e-12), "attached witness above its bound");
    }
    res.require(worst_sub <= 1e-9, "subharmonic residual " + num(worst_sub));

    // Boundary value problems on radii 3..8.
    const std::vector<RootedGraph> graphs{build_model_tree(ModelTreeSpec::constant(2), 10),
                                          build_model_tree(ModelTreeSpec::constant(3), 9),
                                          build_model_tree(ModelTreeSpec::polynomial(1), 9),
                                          fixtures::grid(25, 25, 312)};
    for (const auto& g : graphs)
      for (double lambda : lambdas) {
        std::optional<LambdaFunction> prev_d, prev_e;
        std::optional<BallRestriction> prev_b;
        for (int r = 3; r <= 8; ++r) {
          const auto b = ball(g, r);
          const auto d = solve_dirichlet_lambda(g, b, lambda);
          const auto e = solve_exception(g, b, lambda);
          worst_residual = std::max({worst_residual, d.residual_max, e.residual_max});
          if (prev_b) {
            // v_r extended by 1 decreases in r; the exceptional solution extended by 0 increases.
            for (std::size_t i = 0; i < prev_b->size(); ++i) {
              const auto j = b.index_of(prev_b->all[i]);
              res.require(d.values[j] <= prev_d->values[i] + 1e-12, "Dirichlet solution not decreasing in r");
              res.require(e.values[j] >= prev_e->values[i] - 1e-12, "exceptional solution not increasing in r");
              if (!res.passed) return;
            }
          }
          prev_b = b;
          prev_d = d;
          prev_e = e;
        }
      }
    res.require(worst_residual <= 1e-9, "boundary value residual " + num(worst_residual));
    res.note("worst relative subharmonic excess " + num(worst_sub) + ", worst linear residual " +
             num(worst_residual));
  });
}

// ---------------------------------------------------------------------------
// 6. Comparison with model trees.

inline CheckResult comparison_theorems() {
  return detail::timed(6, "comparison with model trees", 120.0, [](CheckResult& res) {
    const std::vector<double> times{0.5, 1.0, 2.0};
    for (const auto& spec : {ModelTreeSpec::constant(2), ModelTreeSpec::constant(3), ModelTreeSpec::geometric(2),
                             ModelTreeSpec::polynomial(2)}) {
      const auto rho = radial_kernel(spec, 10, times);
      for (const auto& row : rho.values)
        for (std::size_t r = 0; r + 1 < row.size(); ++r)
          res.require(row[r + 1] <= row[r] + 1e-15, spec.describe() + ": rho_t not non-increasing");
    }

    struct SelfCase {
      ModelTreeSpec spec;
      int depth, radius;
    };
    double self_diff = 0;
    for (const auto& c : {SelfCase{ModelTreeSpec::constant(2), 8, 6}, SelfCase{ModelTreeSpec::constant(3), 6, 4},
                          SelfCase{ModelTreeSpec::geometric(2), 5, 3}}) {
      const auto g = build_model_tree(c.spec, c.depth);
      for (auto dir : {ComparisonDirection::lower, ComparisonDirection::upper}) {
        const auto rep = compare_with_model(g, g.root(), c.spec, times, dir, c.radius);
        res.require(rep.hypothesis_ok && rep.compared, c.spec.describe() + ": self-comparison hypothesis failed");
        self_diff = std::max(self_diff, rep.max_abs_difference);
      }
    }
    res.require(self_diff <= 1e-9, "self-comparison difference " + num(self_diff));

    const auto sphere_edges = fixtures::binary_with_sphere_edges(8);
    const auto up = compare_with_model(sphere_edges, sphere_edges.root(), ModelTreeSpec::constant(2), times,
                                       ComparisonDirection::upper, 6);
    res.require(up.hypothesis_ok && up.holds, "sphere-edge fixture: p <= rho fails, margin " + num(up.worst_margin));
    const auto reduced = fixtures::binary_valence_reduced(9, 5);
    const auto low = compare_with_model(reduced, reduced.root(), ModelTreeSpec::constant(2), times,
                                        ComparisonDirection::lower, 6);
    res.require(low.hypothesis_ok && low.holds, "reduced fixture: p >= rho fails, margin " + num(low.worst_margin));
    // The valence hypothesis is enforced.
    const auto wrong = compare_with_model(reduced, reduced.root(), ModelTreeSpec::constant(2), times,
                                          ComparisonDirection::upper, 6);
    res.require(!wrong.hypothesis_ok, "reduced fixture accepted for the upper comparison");
    res.note("self-comparison " + num(self_diff) + "; sphere-edge margin " + num(up.worst_margin) +
             "; reduced margin " + num(low.worst_margin));
  });
}

// ---------------------------------------------------------------------------
// 7. Spectral bounds.

inline CheckResult spectral_bounds() {
  return detail::timed(7, "spectral bounds", 120.0, [](CheckResult& res) {
    // lambda0(Lap_r) is non-increasing in r.
    const auto binary = build_model_tree(ModelTreeSpec::constant(2), 11);
    const auto grid = fixtures::grid(31, 31, 480);
    for (const auto* g : {&binary, &grid}) {
      double prev = std::numeric_limits<double>::infinity();
      for (int r = 1; r <= 10; ++r) {
        const auto gs = lambda0(assemble_dirichlet(*g, ball(*g, r)));
        res.require(gs.lambda0 <= prev + 1e-10, "lambda0 increased at r=" + std::to_string(r));
        res.require(gs.lambda0 > 0, "lambda0 not positive");
        res.require(gs.positive, "ground state not positive at r=" + std::to_string(r));
        prev = gs.lambda0;
      }
    }

    const auto geo = build_model_tree(ModelTreeSpec::geometric(2), 5);
    const auto curv = curvature_bound(geo, {}, geo.horizon());
    res.require(curv.c == 3.0 / 5.0, "c = " + num(curv.c) + ", expected 3/5");
    const auto sb = lambda0_lower_bounds(geo, {}, {1, 2, 3, 4});
    res.require(std::abs(sb.bound_bounded - 0.18) <= 1e-15, "c^2/2 = " + num(sb.bound_bounded));
    for (double l : sb.lambda0_bounded) res.require(l >= 0.18 - 1e-9, "bounded lambda0 " + num(l) + " below 0.18");
    res.require(sb.respected, "curvature bounds violated without A");

    const auto a = detail::ball_ids(geo, 1);
    const auto sa = lambda0_lower_bounds(geo, a, {3, 4});
    res.require(sa.curvature.c == 7.0 / 9.0 && sa.curvature.min_valence == 9.0, "c, m for G \\ B_1");
    res.require(sa.respected, "physical bound m c^2 / 2 = " + num(sa.bound_physical) + " violated");

    // Enumerated Cheeger values dominate the curvature constant.
    struct CheegerCase {
      std::string name;
      RootedGraph g;
      std::vector<VertexId> removed;
      int radius, size;
    };
    std::vector<CheegerCase> cases;
    cases.push_back({"binary", binary, {}, 5, 10});
    cases.push_back({"binary \\ B_1", binary, detail::ball_ids(binary, 1), 5, 8});
    cases.push_back({"ternary", build_model_tree(ModelTreeSpec::constant(3), 6), {}, 4, 7});
    cases.push_back({"geometric", geo, {}, 2, 6});
    cases.push_back({"geometric \\ B_1", geo, a, 3, 4});
    cases.push_back({"ray", fixtures::ray(40), {}, 30, 12});
    cases.push_back({"grid", grid, {}, 4, 8});
    cases.push_back({"random tree", fixtures::random_tree(300, 1), {}, 4, 6});
    for (const auto& c : cases) {
      const auto alpha = cheeger_exact(c.g, c.removed, c.radius, c.size);
      const auto cc = curvature_bound(c.g, c.removed, c.radius);
      res.require(alpha.alpha >= cc.c - 1e-12, c.name + ": Cheeger value " + num(alpha.alpha) + " below c " + num(cc.c));
      res.note(c.name + ": alpha <= " + num(alpha.alpha) + ", c = " + num(cc.c) + " (" +
               std::to_string(alpha.sets_enumerated) + " sets)");
    }
  });
}

// ---------------------------------------------------------------------------
// 8. Essential spectrum.

inline CheckResult essential_spectrum() {
  return detail::timed(8, "essential-spectrum certificate", 10.0, [](CheckResult& res) {
    const auto geo = build_model_tree(ModelTreeSpec::geometric(2), 5);
    const auto cert = ess_spectrum_certificate(geo, 12);
    res.require(cert.empty_certified, "geometric tree not certified: " + cert.reason);
    res.require(cert.c == 3.0 / 5.0, "geometric c = " + num(cert.c));
    for (std::size_t r = 0; r < cert.outer_min_valence.size(); ++r) {
      res.require(cert.outer_min_valence[r] == std::ldexp(1.0, static_cast<int>(r) + 2) + 1, "m_c(r) mismatch");
      if (r > 0) res.require(cert.lower_bounds[r] > cert.lower_bounds[r - 1], "bounds not increasing");
    }
    res.require(cert.lower_bounds.back() > 1000 * cert.lower_bounds.front(), "bounds do not grow");

    const auto ternary = ess_spectrum_certificate(build_model_tree(ModelTreeSpec::constant(3), 7), 12);
    res.require(!ternary.empty_certified && std::abs(ternary.c - 0.5) < 1e-15, "constant tree not inconclusive");
    const auto tagged_ray = ess_spectrum_certificate(build_model_tree(ModelTreeSpec::constant(1), 30), 12);
    res.require(!tagged_ray.empty_certified && tagged_ray.c == 0, "ray not inconclusive");
    const auto ray = ess_spectrum_certificate(fixtures::ray(50), 12);
    res.require(!ray.empty_certified, "explicit ray certified");
    res.note("geometric bounds " + num(cert.lower_bounds.front()) + " .. " + num(cert.lower_bounds.back()) +
             "; constant: " + ternary.reason + "; ray: " + tagged_ray.reason);
  });
}

// ---------------------------------------------------------------------------
// 9. Monte Carlo cross-validation.

inline CheckResult monte_carlo() {
  return detail::timed(9, "Monte Carlo cross-validation", 300.0, [](CheckResult& res) {
    constexpr std::uint64_t n = 100000;
    int configs = 0;
    double worst_z = 0;
    auto agree = [&](const std::string& what, double estimate, double reference) {
      const double sigma = std::sqrt(reference * (1 - reference) / static_cast<double>(n));
      const double z = sigma > 0 ? std::abs(estimate - reference) / sigma : (estimate == reference ? 0 : 1e9);
      worst_z = std::max(worst_z, z);
      res.require(z <= 3.0, what + ": estimate " + num(estimate) + " vs " + num(reference) + " (" + num(z) + " sigma)");
    };
    auto config = [&](VertexId source, double t, int radius, std::uint64_t seed) {
      WalkConfig c;
      c.source = source;
      c.t = t;
      c.radius = radius;
      c.trials = n;
      c.seed = seed;
      return c;
    };
    auto kernel = [](const RootedGraph& g, int radius, VertexId source, double t) {
      const double times[] = {t};
      return dirichlet_kernel(assemble_dirichlet(g, ball(g, radius)), source, times);
    };

    {  // 1. single interior vertex between two boundary vertices: e^{-2t}
      const auto g = fixtures::path(5, 2);
      agree("path", survival_estimate(g, config(2, 1.0, 1, 1)).p_hat, std::exp(-2.0));
      ++configs;
    }
    {  // 2. K2 occupancy
      const auto g = fixtures::complete(2);
      const auto occ = occupancy_estimate(g, config(0, 1.0, 1, 2), {0, 1});
      agree("K2 other vertex", occ.p_hat[1], (1 - std::exp(-2.0)) / 2);
      agree("K2 same vertex", occ.p_hat[0], (1 + std::exp(-2.0)) / 2);
      ++configs;
    }
    const auto binary = build_model_tree(ModelTreeSpec::constant(2), 9);
    {  // 3. binary tree r = 8
      agree("binary r=8", survival_estimate(binary, config(binary.root(), 1.0, 8, 3)).p_hat,
            kernel(binary, 8, binary.root(), 1.0).mass(1.0));
      ++configs;
    }
    {  // 4. implicit binary tree r = 4, occupancy
      const ModelTree implicit(ModelTreeSpec::constant(2));
      const auto k = kernel(binary, 4, binary.root(), 0.5);
      agree("implicit binary r=4", survival_estimate(implicit, config(implicit.root(), 0.5, 4, 4)).p_hat, k.mass(0.5));
      const std::vector<VertexId> targets{tree_vertex(0, 0), tree_vertex(1, 0), tree_vertex(2, 3), tree_vertex(4, 0)};
      const auto occ = occupancy_estimate(implicit, config(implicit.root(), 0.5, 4, 5), targets);
      for (std::size_t i = 0; i < targets.size(); ++i) {
        const double p = k.value(0.5, targets[i]);
        if (p >= 10.0 / static_cast<double>(n)) agree("implicit binary occupancy", occ.p_hat[i], p);
      }
      res.require(occ.p_hat[3] == 0.0, "boundary vertex occupied");
      ++configs;
    }
    {  // 5-6. geometric tree against the radial masses
      const ModelTree geo(ModelTreeSpec::geometric(2));
      const double t1[] = {1.0};
      agree("geometric r=8", survival_estimate(geo, config(geo.root(), 1.0, 8, 6)).p_hat,
            radial_mass(geo.spec(), 8, t1)[0]);
      agree("geometric r=9", survival_estimate(geo, config(geo.root(), 1.0, geo.horizon(), 7)).p_hat,
            radial_mass(geo.spec(), geo.horizon(), t1)[0]);
      configs += 2;
    }
    {  // 7. ternary tree r = 5, t = 2
      const ModelTree ternary(ModelTreeSpec::constant(3));
      const double t2[] = {2.0};
      agree("ternary r=5", survival_estimate(ternary, config(ternary.root(), 2.0, 5, 8)).p_hat,
            radial_mass(ternary.spec(), 5, t2)[0]);
      ++configs;
    }
    {  // 8. grid, off-center source
      const auto g = fixtures::grid(11, 11, 60);
      const auto k = kernel(g, 4, 61, 1.0);
      agree("grid survival", survival_estimate(g, config(61, 1.0, 4, 9)).p_hat, k.mass(1.0));
      const auto occ = occupancy_estimate(g, config(61, 1.0, 4, 10), {61, 60, 62});
      for (std::size_t i = 0; i < 3; ++i) agree("grid occupancy", occ.p_hat[i], k.value(1.0, occ.targets[i]));
      ++configs;
    }
    {  // 9. cycle with boundary target
      const auto g = fixtures::cycle(12);
      const auto k = kernel(g, 4, 0, 0.5);
      agree("cycle survival", survival_estimate(g, config(0, 0.5, 4, 11)).p_hat, k.mass(0.5));
      const auto occ = occupancy_estimate(g, config(0, 0.5, 4, 12), {0, 1, 11, 4});
      for (std::size_t i = 0; i < 3; ++i) agree("cycle occupancy", occ.p_hat[i], k.value(0.5, occ.targets[i]));
      res.require(occ.p_hat[3] == 0.0, "cycle boundary vertex occupied");
      ++configs;
    }
    {  // 10. attached graph
      const auto g = fixtures::attached_example(4, 5);
      agree("attached survival", survival_estimate(g, config(g.root(), 1.0, 3, 13)).p_hat,
            kernel(g, 3, g.root(), 1.0).mass(1.0));
      ++configs;
    }
    res.require(configs == 10, "expected 10 configurations");

    // Stream splitting: the estimate does not depend on the worker count.
    auto c1 = config(binary.root(), 1.0, 8, 3);
    auto c4 = c1;
    c4.threads = 4;
    res.require(survival_estimate(binary, c1).survivors == survival_estimate(binary, c4).survivors,
                "estimate depends on the thread count");

    // Rate-1 walk (bounded Laplacian): survival -> 1 as r grows.
    const ModelTree geo(ModelTreeSpec::geometric(2));
    std::vector<SurvivalEstimate> bounded;
    for (int r : {3, 6, 9}) {
      auto c = config(geo.root(), 2.0, r, 20 + static_cast<std::uint64_t>(r));
      c.rate = WalkRate::bounded;
      bounded.push_back(survival_estimate(geo, c));
    }
    for (std::size_t i = 1; i < bounded.size(); ++i) {
      const double s = std::hypot(bounded[i].stderr_, bounded[i - 1].stderr_);
      res.require(bounded[i].p_hat >= bounded[i - 1].p_hat - 3 * s, "bounded-rate survival not increasing in r");
    }
    res.require(bounded.back().p_hat > 0.999, "bounded-rate survival " + num(bounded.back().p_hat) + " not near 1");
    res.note(std::to_string(configs) + " configurations, worst deviation " + num(worst_z) +
             " sigma; bounded-rate survival " + num(bounded[0].p_hat) + ", " + num(bounded[1].p_hat) + ", " +
             num(bounded[2].p_hat));
  });
}

// ---------------------------------------------------------------------------
// 10. Green's identity.

inline CheckResult green_identity() {
  return detail::timed(10, "Green's identity", 10.0, [](CheckResult& res) {
    auto fixtures_list = fixtures::kernel_fixtures();
    fixtures::Rng rng(2024);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto& fx = fixtures_list[rng.below(fixtures_list.size())];
      const auto& g = fx.graph;
      const int max_r = std::max(1, std::min(g.horizon() - 1, fx.radius + 1));
      const int r = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_r)));
      const auto b = ball(g, r);
      std::vector<double> f(g.graph().size()), h(g.graph().size());
      for (auto& x : f) x = 2 * rng.uniform() - 1;
      for (auto& x : h) x = 2 * rng.uniform() - 1;
      const auto& graph = g.graph();
      const auto out = green_identity_check(
          g, b, [&](VertexId v) { return f[graph.index_of(v)]; }, [&](VertexId v) { return h[graph.index_of(v)]; });
      worst = std::max(worst, out.relative());
    }
    res.require(worst <= 1e-10, "relative residual " + num(worst));
    res.note("1000 trials, worst relative residual " + num(worst));
  });
}

// ---------------------------------------------------------------------------

inline const std::vector<std::function<CheckResult()>>& all_checks() {
  static const std::vector<std::function<CheckResult()>> checks{
      closed_form_kernels, dirichlet_kernel_properties, exhaustion_convergence, completeness_verdicts,
      witness_functions,   comparison_theorems,         spectral_bounds,        essential_spectrum,
      monte_carlo,         green_identity};
  return checks;
}

/// Runs the selected checks (all when `ids` is empty), in order.
inline std::vector<CheckResult> run(const std::vector<int>& ids = {}) {
  std::vector<CheckResult> out;
  const auto& checks = all_checks();
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    out.push_back(checks[i]());
  }
  return out;
}

inline std::string summary_line(const CheckResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << r.id << "  " << r.name << "  ("
     << std::fixed << std::setprecision(2) << r.seconds << " s)";
  return os.str();
}

}  // namespace graphheat::validation

#endif  // GRAPHHEAT_VALIDATION_HPP
