#ifndef GRAPHHEAT_COMPLETENESS_HPP
#define GRAPHHEAT_COMPLETENESS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "graphheat/graph.hpp"
#include "graphheat/heat_kernel.hpp"
#include "graphheat/laplacian.hpp"
#include "graphheat/model_tree.hpp"

namespace graphheat {

// ---------------------------------------------------------------------------
// Tail behavior of closed-form branching rules.

/// What the closed form of a rule says about the infinite valence series.
struct TailFacts {
  bool known = false;
  bool inverse_max_diverges = false;     // sum 1/M(r) = infinity
  bool ratio_converges = false;          // sum_{r>=1} m_{-1}/m_{+1} < infinity
  bool inverse_branching_diverges = false;  // sum 1/n(r) = infinity
  std::optional<double> ratio_limit;     // closed form of sum_{r>=1} 1/n(r) when known
  std::string rule;
};

inline TailFacts tail_facts(const ModelTreeSpec& spec) {
  TailFacts f;
  f.rule = spec.describe();
  if (!spec.tagged()) return f;
  f.known = true;
  const auto a = static_cast<double>(spec.coeff);
  const bool constant_like = spec.kind == ModelTreeSpec::Kind::constant ||
                             (spec.kind == ModelTreeSpec::Kind::geometric && spec.base == 1) ||
                             (spec.kind == ModelTreeSpec::Kind::polynomial && spec.degree == 0);
  if (constant_like) {
    // M(r) = n + 1 is bounded: both series diverge.
    f.inverse_max_diverges = f.inverse_branching_diverges = true;
    return f;
  }
  if (spec.kind == ModelTreeSpec::Kind::geometric) {
    // n(r) = a b^r, b >= 2: geometric tails, sum_{r>=1} 1/(a b^r) = 1/(a (b-1)).
    f.ratio_converges = true;
    f.ratio_limit = 1.0 / (a * (static_cast<double>(spec.base) - 1.0));
    return f;
  }
  // n(r) = a (r+1)^d: harmonic-type for d = 1, zeta tail for d >= 2.
  if (spec.degree == 1) {
    f.inverse_max_diverges = f.inverse_branching_diverges = true;
  } else {
    f.ratio_converges = true;
    f.ratio_limit = (std::riemann_zeta(static_cast<double>(spec.degree)) - 1.0) / a;
  }
  return f;
}

/// Upper bound for sum_{i > h} 1/n(i); +inf when the series diverges or the
/// rule carries no tail information.
inline double inverse_branching_tail(const ModelTreeSpec& spec, int h) {
  const auto facts = tail_facts(spec);
  if (!facts.known || facts.inverse_branching_diverges) return std::numeric_limits<double>::infinity();
  const auto a = static_cast<double>(spec.coeff);
  if (spec.kind == ModelTreeSpec::Kind::geometric) {
    const auto b = static_cast<double>(spec.base);
    return 1.0 / (a * std::pow(b, h + 1)) * b / (b - 1.0);
  }
  const auto d = static_cast<double>(spec.degree);
  return 1.0 / (a * (d - 1.0) * std::pow(static_cast<double>(h + 1), d - 1.0));
}

// ---------------------------------------------------------------------------
// Sphere statistics up to an arbitrary horizon.

/// Sphere statistics from the materialized graph inside its horizon and from
/// the branching rule beyond it. The rule is trusted only if it reproduces
/// the materialized statistics.
class SphereStatsTable {
 public:
  SphereStatsTable(const RootedGraph& g, int horizon, std::optional<Side> restrict_to = std::nullopt)
      : horizon_(horizon) {
    if (horizon < 0) throw PreconditionError("negative horizon");
    const int materialized = std::min(horizon, g.horizon());
    for (int r = 0; r <= materialized; ++r) {
      auto s = sphere_stats(g, r, restrict_to);
      if (!s) break;
      stats_.push_back(*s);
    }
    exhausted_ = static_cast<int>(stats_.size()) <= materialized;
    if (g.model() && !(g.has_partition() && restrict_to != Side::h)) {
      model_ = g.model();
      const int check = static_cast<int>(stats_.size());
      for (int r = 1; r < check && model_consistent_; ++r) {
        const auto& s = stats_[static_cast<std::size_t>(r)];
        const double n = model_->n(r);
        if (static_cast<double>(s.min_out) != n || static_cast<double>(s.max_valence) != n + 1.0 || s.max_in != 1)
          model_consistent_ = false;
      }
      // The root sphere of an attached H also sees H^C, so only check it for
      // plain model trees.
      if (check > 0 && model_consistent_ && !g.has_partition()) {
        const auto& s0 = stats_.front();
        if (static_cast<double>(s0.max_valence) != model_->n(0)) model_consistent_ = false;
      }
    }
    if (!exhausted_ && static_cast<int>(stats_.size()) <= horizon) {
      if (!model_ || !model_consistent_) throw HorizonError(horizon, g.horizon());
      for (int r = static_cast<int>(stats_.size()); r <= horizon; ++r) stats_.push_back(model_sphere_stats(*model_, r));
    }
  }

  int horizon() const noexcept { return horizon_; }
  /// Number of non-empty spheres available (<= horizon + 1).
  int available() const noexcept { return static_cast<int>(stats_.size()); }
  bool exhausted() const noexcept { return exhausted_; }
  const SphereStats& at(int r) const { return stats_.at(static_cast<std::size_t>(r)); }
  const std::optional<ModelTreeSpec>& model() const noexcept { return model_; }
  bool model_trusted() const noexcept { return model_ && model_consistent_; }

 private:
  int horizon_;
  std::vector<SphereStats> stats_;
  std::optional<ModelTreeSpec> model_;
  bool model_consistent_ = true;
  bool exhausted_ = false;
};

// ---------------------------------------------------------------------------
// Criterion sums.

enum class CriterionKind { max_valence_divergence, ratio_convergence, model_iff, attached_subgraph };
enum class Verdict { complete_certified, incomplete_certified, inconclusive };

inline const char* to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::max_valence_divergence:
      return "max-valence-divergence";
    case CriterionKind::ratio_convergence:
      return "ratio-convergence";
    case CriterionKind::model_iff:
      return "model-iff";
    case CriterionKind::attached_subgraph:
      return "attached-subgraph";
  }
  return "";
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::complete_certified:
      return "complete-certified";
    case Verdict::incomplete_certified:
      return "incomplete-certified";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "";
}

struct CriterionReport {
  CriterionKind kind = CriterionKind::max_valence_divergence;
  std::vector<double> partial_sums;  // partial_sums[r] = sum up to sphere r
  int first_index = 0;               // sphere index of the first term
  Verdict verdict = Verdict::inconclusive;
  std::string tail_rule;             // empty when no closed-form rule applies
  std::optional<double> limit;       // closed-form value of the infinite sum, if known
  int horizon = 0;
  std::string evidence;
};

/// Partial sums of sum 1/M(r) (r >= 0), sum_{r>=1} upper m_{-1}(r) / lower
/// m_{+1}(r) and, for model trees, sum 1/n(r). For graphs produced by
/// attach_at_vertex only the H-restricted ratio sum is formed.
///
/// Verdicts are certified only through a closed-form branching rule that
/// reproduces the materialized spheres; partial sums alone never certify.
inline std::vector<CriterionReport> criterion_sums(const RootedGraph& g, int horizon) {
  if (horizon < 1) throw PreconditionError("criterion sums need a horizon >= 1");
  std::vector<CriterionReport> out;

  auto ratio_sums = [&](const SphereStatsTable& table) {
    std::vector<double> sums;
    double acc = 0.0;
    for (int r = 1; r < table.available(); ++r) {
      const auto& s = table.at(r);
      acc += s.min_out == 0 ? std::numeric_limits<double>::infinity()
                            : static_cast<double>(s.max_in) / static_cast<double>(s.min_out);
      sums.push_back(acc);
    }
    return sums;
  };

  if (g.has_partition()) {
    const SphereStatsTable table(g, horizon, Side::h);
    CriterionReport rep;
    rep.kind = CriterionKind::attached_subgraph;
    rep.first_index = 1;
    rep.horizon = horizon;
    rep.partial_sums = ratio_sums(table);
    if (table.model_trusted()) {
      const auto facts = tail_facts(*table.model());
      if (facts.known) rep.tail_rule = facts.rule;
      if (facts.ratio_converges) {
        rep.verdict = Verdict::incomplete_certified;
        rep.limit = facts.ratio_limit;
        rep.evidence = "H-restricted ratio series converges by the closed form of H's branching rule";
      } else {
        rep.evidence = "H-restricted ratio series diverges; the attachment criterion does not apply";
      }
    } else {
      rep.evidence = "no closed-form rule for H; partial sums only";
    }
    out.push_back(std::move(rep));
    return out;
  }

  const SphereStatsTable table(g, horizon);
  const bool trusted = table.model_trusted();
  const auto facts = trusted ? tail_facts(*table.model()) : TailFacts{};

  CriterionReport maxv;
  maxv.kind = CriterionKind::max_valence_divergence;
  maxv.horizon = horizon;
  double acc = 0.0;
  for (int r = 0; r < table.available(); ++r) {
    acc += 1.0 / static_cast<double>(table.at(r).max_valence);
    maxv.partial_sums.push_back(acc);
  }
  if (facts.known) maxv.tail_rule = facts.rule;
  if (facts.known && facts.inverse_max_diverges) {
    maxv.verdict = Verdict::complete_certified;
    maxv.evidence = "sum 1/M(r) diverges by the closed form of the branching rule";
  } else {
    maxv.evidence = facts.known ? "sum 1/M(r) converges; criterion silent" : "no closed-form rule; partial sums only";
  }
  out.push_back(std::move(maxv));

  CriterionReport ratio;
  ratio.kind = CriterionKind::ratio_convergence;
  ratio.first_index = 1;
  ratio.horizon = horizon;
  ratio.partial_sums = ratio_sums(table);
  if (facts.known) ratio.tail_rule = facts.rule;
  if (facts.known && facts.ratio_converges) {
    ratio.verdict = Verdict::incomplete_certified;
    ratio.limit = facts.ratio_limit;
    ratio.evidence = "sum m_{-1}/m_{+1} converges by the closed form of the branching rule";
  } else {
    ratio.evidence = facts.known ? "ratio series diverges; criterion silent" : "no closed-form rule; partial sums only";
  }
  out.push_back(std::move(ratio));

  if (trusted) {
    CriterionReport model;
    model.kind = CriterionKind::model_iff;
    model.horizon = horizon;
    const auto& spec = *table.model();
    double s = 0.0;
    for (int r = 0; r < table.available(); ++r) {
      s += 1.0 / spec.n(r);
      model.partial_sums.push_back(s);
    }
    model.tail_rule = facts.rule;
    if (facts.known) {
      model.verdict = facts.inverse_branching_diverges ? Verdict::complete_certified : Verdict::incomplete_certified;
      model.evidence = facts.inverse_branching_diverges ? "sum 1/n(r) diverges" : "sum 1/n(r) converges";
    } else {
      model.evidence = "model tree without closed-form tail; partial sums only";
    }
    out.push_back(std::move(model));
  }
  return out;
}

/// Combined verdict of a set of criteria. Opposite certified verdicts would
/// mean a broken rule analysis and raise NumericalError.
inline Verdict combine(const std::vector<CriterionReport>& reports) {
  bool complete = false, incomplete = false;
  for (const auto& r : reports) {
    complete |= r.verdict == Verdict::complete_certified;
    incomplete |= r.verdict == Verdict::incomplete_certified;
  }
  if (complete && incomplete) throw NumericalError("criteria certify opposite verdicts");
  if (complete) return Verdict::complete_certified;
  if (incomplete) return Verdict::incomplete_certified;
  return Verdict::inconclusive;
}

// ---------------------------------------------------------------------------
// lambda-(sub)harmonic functions.

enum class LambdaCharacter { harmonic, subharmonic, harmonic_except_root };

inline const char* to_string(LambdaCharacter c) {
  switch (c) {
    case LambdaCharacter::harmonic:
      return "harmonic";
    case LambdaCharacter::subharmonic:
      return "subharmonic";
    case LambdaCharacter::harmonic_except_root:
      return "harmonic-except-root";
  }
  return "";
}

struct LambdaFunction {
  double lambda = -1.0;
  LambdaCharacter character = LambdaCharacter::subharmonic;
  std::vector<VertexId> vertices;  // vertexwise values, when materialized
  std::vector<double> values;
  std::vector<double> radial;  // v(r), for radial constructions
  int horizon = 0;
  double sup = 0.0;             // max over everything computed
  double residual_max = 0.0;    // see the constructing function
  int checked_vertices = 0;
  bool positive = false;
  double horizon_bound = std::numeric_limits<double>::infinity();  // product bound up to the horizon
  double global_bound = std::numeric_limits<double>::infinity();   // bound for all r, if certified
  bool bounded_certified = false;
  std::string bound_certificate;
  bool refused = false;
  std::string refusal;

  double value(VertexId v) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == v) return values[i];
    throw PreconditionError("vertex " + std::to_string(v) + " has no value");
  }
};

namespace detail {

/// v(0..h) from the radial recurrence, started at v(0), v(1).
inline std::vector<double> subharmonic_recurrence(const SphereStatsTable& table, double lambda, double v0, double v1,
                                                  int first, int h) {
  std::vector<double> v{v0, v1};
  for (int r = first; r < h; ++r) {
    const auto& s = table.at(r);
    if (s.min_out == 0)
      throw PreconditionError("sphere " + std::to_string(r) + " has a vertex without outward neighbors");
    const double out = static_cast<double>(s.min_out);
    const double in = static_cast<double>(s.max_in);
    const double vr = v[static_cast<std::size_t>(r)];
    const double prev = v[static_cast<std::size_t>(r - 1)];
    v.push_back((1.0 - lambda / out) * vr + (in / out) * (vr - prev));
  }
  return v;
}

/// log prod_{i=first}^{h-1} (1 + (upper m_{-1}(i) - lambda) / lower m_{+1}(i)).
inline double log_product(const SphereStatsTable& table, double lambda, int first, int h) {
  double acc = 0.0;
  for (int i = first; i < h; ++i) {
    const auto& s = table.at(i);
    acc += std::log1p((static_cast<double>(s.max_in) - lambda) / static_cast<double>(s.min_out));
  }
  return acc;
}

/// Worst relative excess (Lap v - lambda v) / |lambda v| over the
/// materialized spheres 0..last of a radial function.
inline double radial_residual(const RootedGraph& g, const std::vector<double>& v, double lambda, int last,
                              int& checked, std::optional<Side> only = std::nullopt) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int r = 0; r <= last; ++r)
    for (auto i : g.sphere_indices(r)) {
      if (only && g.side_at(i) != *only) continue;
      double lap = 0.0;
      for (auto j : g.graph().neighbor_indices(i))
        lap += v[static_cast<std::size_t>(r)] - v[static_cast<std::size_t>(g.distance_at(j))];
      const double lv = lambda * v[static_cast<std::size_t>(r)];
      worst = std::max(worst, (lap - lv) / std::abs(lv));
      ++checked;
    }
  return worst;
}

}  // namespace detail

/// Bounded positive lambda-subharmonic candidate depending only on r:
///   v(1)   = (1 - lambda / m(x0)) v(0)
///   v(r+1) = (1 - lambda / lower m_{+1}(r)) v(r) + (upper m_{-1}(r) / lower m_{+1}(r)) (v(r) - v(r-1)).
/// residual_max is the worst relative excess (Lap v - lambda v)/|lambda v|
/// over the materialized vertices of spheres 0..horizon-1 (<= 0 up to
/// rounding). The bound prod (1 + (m_{-1} - lambda)/m_{+1}) v(0) is computed
/// in log space; it extends to all r when the rule's tail is summable.
inline LambdaFunction build_subharmonic(const RootedGraph& g, double lambda, double v0, int horizon) {
  if (!(lambda < 0)) throw PreconditionError("lambda must be negative");
  if (!(v0 > 0)) throw PreconditionError("v(0) must be positive");
  if (horizon < 1) throw PreconditionError("horizon must be >= 1");
  const SphereStatsTable table(g, horizon);
  const int h = std::min(horizon, table.available() - 1);
  if (h < 1) throw PreconditionError("graph has no sphere S_1");

  LambdaFunction f;
  f.lambda = lambda;
  f.character = LambdaCharacter::subharmonic;
  f.horizon = h;
  const double m0 = static_cast<double>(table.at(0).max_valence);
  f.radial = detail::subharmonic_recurrence(table, lambda, v0, (1.0 - lambda / m0) * v0, 1, h);
  f.sup = *std::max_element(f.radial.begin(), f.radial.end());
  f.positive = std::all_of(f.radial.begin(), f.radial.end(), [](double x) { return x > 0; });

  const double log_bound = std::log(v0) + detail::log_product(table, lambda, 0, h);
  f.horizon_bound = std::exp(log_bound);
  f.bound_certificate = "product bound over spheres 0.." + std::to_string(h - 1);
  if (table.model_trusted()) {
    // log(1 + x) <= x and x_i = (1 - lambda) / n(i) beyond the root.
    const double tail = (1.0 - lambda) * inverse_branching_tail(*table.model(), h - 1);
    if (std::isfinite(tail)) {
      f.global_bound = std::exp(log_bound + tail);
      f.bounded_certified = true;
      f.bound_certificate = "closed-form product bound, rule " + table.model()->describe();
    }
  }

  const int last = std::min(h - 1, g.horizon());
  int checked = 0;
  f.residual_max = detail::radial_residual(g, f.radial, lambda, std::min(last, g.eccentricity()), checked);
  // Spheres beyond the materialized graph are checked radially with the
  // rule's statistics, which describe every vertex of such a sphere.
  for (int r = last + 1; r <= h - 1; ++r) {
    const auto& s = table.at(r);
    const auto vr = f.radial[static_cast<std::size_t>(r)];
    const double lap = static_cast<double>(s.min_out) * (vr - f.radial[static_cast<std::size_t>(r + 1)]) +
                       static_cast<double>(s.max_in) * (vr - f.radial[static_cast<std::size_t>(r - 1)]);
    f.residual_max = std::max(f.residual_max, (lap - lambda * vr) / std::abs(lambda * vr));
    ++checked;
  }
  f.checked_vertices = checked;
  return f;
}

namespace detail {

inline LambdaFunction solve_on(const RootedGraph& g, const BallRestriction& b, double lambda,
                               const std::vector<VertexId>& unknowns, const std::unordered_map<VertexId, double>& fixed,
                               LambdaCharacter character) {
  const auto& graph = g.graph();
  std::unordered_map<VertexId, std::size_t> idx;
  for (std::size_t i = 0; i < unknowns.size(); ++i) idx.emplace(unknowns[i], i);
  const auto n = static_cast<Eigen::Index>(unknowns.size());
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    const auto xi = graph.index_of(unknowns[i]);
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), static_cast<double>(graph.degree_at(xi)) - lambda);
    for (auto j : graph.neighbor_indices(xi)) {
      const VertexId y = graph.id(j);
      if (const auto it = idx.find(y); it != idx.end()) {
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(it->second), -1.0);
      } else if (const auto fx = fixed.find(y); fx != fixed.end()) {
        rhs[static_cast<Eigen::Index>(i)] += fx->second;
      }
    }
  }
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(n);
  double residual = 0.0;
  if (n > 0) {
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success) throw NumericalError("lambda-system is singular");
    sol = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw NumericalError("lambda-system solve failed");
    residual = (a * sol - rhs).lpNorm<Eigen::Infinity>();
  }
  LambdaFunction f;
  f.lambda = lambda;
  f.character = character;
  f.horizon = b.radius;
  f.residual_max = residual;
  f.vertices = b.all;
  f.values.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const VertexId v = b.all[i];
    if (const auto it = idx.find(v); it != idx.end()) f.values[i] = sol[static_cast<Eigen::Index>(it->second)];
    else if (const auto fx = fixed.find(v); fx != fixed.end()) f.values[i] = fx->second;
  }
  f.sup = f.values.empty() ? 0.0 : *std::max_element(f.values.begin(), f.values.end());
  f.checked_vertices = static_cast<int>(unknowns.size());
  return f;
}

}  // namespace detail

/// Solves Lap v - lambda v = 0 on int B_r with v = 1 on the boundary.
/// residual_max is the max-norm residual of the linear system.
inline LambdaFunction solve_dirichlet_lambda(const RootedGraph& g, const BallRestriction& b, double lambda) {
  if (!(lambda < 0)) throw PreconditionError("lambda must be negative");
  if (b.boundary.empty()) throw PreconditionError("ball has no boundary");
  std::unordered_map<VertexId, double> fixed;
  for (auto v : b.boundary) fixed.emplace(v, 1.0);
  auto f = detail::solve_on(g, b, lambda, b.interior, fixed, LambdaCharacter::harmonic);
  f.positive = true;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!b.interior_flag[i]) continue;
    if (!(f.values[i] > 0.0 && f.values[i] < 1.0))
      throw NumericalError("Dirichlet lambda-solution leaves (0, 1) at vertex " + std::to_string(b.all[i]));
  }
  f.bound_certificate = "maximum principle: 0 < v < 1";
  return f;
}

/// Solves Lap v - lambda v = 0 on int B_r \ {x0}, v(x0) = 1, v = 0 on the
/// boundary. The boundary may be empty (finite graphs).
inline LambdaFunction solve_exception(const RootedGraph& g, const BallRestriction& b, double lambda) {
  if (!(lambda < 0)) throw PreconditionError("lambda must be negative");
  const VertexId root = g.root();
  if (!b.contains(root) || !b.is_interior(root)) throw PreconditionError("root is not an interior vertex of the ball");
  std::unordered_map<VertexId, double> fixed{{root, 1.0}};
  for (auto v : b.boundary) fixed.emplace(v, 0.0);
  std::vector<VertexId> unknowns;
  for (auto v : b.interior)
    if (v != root) unknowns.push_back(v);
  auto f = detail::solve_on(g, b, lambda, unknowns, fixed, LambdaCharacter::harmonic_except_root);
  f.positive = true;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!b.interior_flag[i] || b.all[i] == root) continue;
    if (!(f.values[i] > 0.0 && f.values[i] < 1.0))
      throw NumericalError("exception solution leaves (0, 1) at vertex " + std::to_string(b.all[i]));
  }
  f.bound_certificate = "maximum principle: 0 < v < 1 off the root";
  return f;
}

/// Witness for a graph G = H u H^C built by attach_at_vertex: lambda-harmonic
/// on H^C and at x0 (from the exceptional solution on H^C + x0), radial and
/// lambda-subharmonic on H from the H-restricted recurrence started at
///   w(1) = (m(x0) - lambda - sum_{y ~ x0, y in H^C} v(y)) / #(H-neighbors of x0).
/// residual_max: worst |Lap v - lambda v| / |lambda v| over H^C and x0, and
/// worst excess over the materialized H vertices.
inline LambdaFunction incompleteness_witness_attached(const RootedGraph& g, double lambda, int horizon) {
  if (!(lambda < 0)) throw PreconditionError("lambda must be negative");
  if (!g.has_partition()) return build_subharmonic(g, lambda, 1.0, horizon);

  const auto criteria = criterion_sums(g, horizon);
  LambdaFunction f;
  f.lambda = lambda;
  f.character = LambdaCharacter::subharmonic;
  if (criteria.front().verdict != Verdict::incomplete_certified) {
    f.refused = true;
    f.refusal = "H-restricted ratio series is not certified convergent (" + criteria.front().evidence + ")";
    return f;
  }

  const auto& graph = g.graph();
  const VertexId root = g.root();
  // K = H^C plus the junction, rooted at the junction.
  std::vector<VertexId> kverts{root};
  std::vector<Edge> kedges;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (g.side_at(i) != Side::complement) continue;
    kverts.push_back(graph.id(i));
    for (auto j : graph.neighbor_indices(i)) {
      const VertexId y = graph.id(j);
      if (y == root || (g.side_at(j) == Side::complement && graph.id(i) < y)) kedges.emplace_back(graph.id(i), y);
    }
  }
  const RootedGraph k(std::make_shared<const Graph>(Graph::from_edges(kverts, kedges)), root);
  const auto kball = ball(k, k.eccentricity());
  const auto exception = solve_exception(k, kball, lambda);

  std::size_t h_neighbors = 0;
  double hc_sum = 0.0;
  const auto ri = graph.index_of(root);
  for (auto j : graph.neighbor_indices(ri)) {
    if (g.side_at(j) == Side::h) ++h_neighbors;
    else hc_sum += exception.value(graph.id(j));
  }
  if (h_neighbors == 0) throw PreconditionError("junction has no neighbors in H");
  const double m0 = static_cast<double>(graph.degree_at(ri));
  const double w1 = (m0 - lambda - hc_sum) / static_cast<double>(h_neighbors);

  const SphereStatsTable table(g, horizon, Side::h);
  const int h = std::min(horizon, table.available() - 1);
  f.horizon = h;
  f.radial = detail::subharmonic_recurrence(table, lambda, 1.0, w1, 1, h);
  f.positive = w1 > 0 && std::all_of(exception.values.begin(), exception.values.end(), [](double x) { return x > 0; });

  const double log_bound = std::log(w1) + detail::log_product(table, lambda, 1, h);
  f.horizon_bound = std::max(1.0, std::exp(log_bound));
  f.bound_certificate = "w(1) times the H-restricted product bound over spheres 1.." + std::to_string(h - 1);
  if (table.model_trusted()) {
    const double tail = (1.0 - lambda) * inverse_branching_tail(*table.model(), h - 1);
    if (std::isfinite(tail)) {
      f.global_bound = std::max(1.0, std::exp(log_bound + tail));
      f.bounded_certified = true;
      f.bound_certificate = "w(1) times the closed-form H product bound, rule " + table.model()->describe();
    }
  }

  // Vertexwise values on H^C and the materialized part of H.
  std::unordered_map<VertexId, double> value;
  for (std::size_t i = 0; i < exception.vertices.size(); ++i) value[exception.vertices[i]] = exception.values[i];
  const int last = std::min(h, g.horizon());
  for (int r = 0; r <= std::min(last, g.eccentricity()); ++r)
    for (auto i : g.sphere_indices(r))
      if (g.side_at(i) == Side::h) value[graph.id(i)] = f.radial[static_cast<std::size_t>(r)];
  double worst = -std::numeric_limits<double>::infinity();
  int checked = 0;
  for (const auto& [v, fv] : value) {
    const auto vi = graph.index_of(v);
    const bool harmonic = v == root || g.side_at(vi) == Side::complement;
    if (!harmonic && g.distance_at(vi) > last - 1) continue;
    double lap = 0.0;
    for (auto j : graph.neighbor_indices(vi)) lap += fv - value.at(graph.id(j));
    const double excess = (lap - lambda * fv) / std::abs(lambda * fv);
    worst = std::max(worst, harmonic ? std::abs(excess) : excess);
    ++checked;
  }
  f.residual_max = worst;
  f.checked_vertices = checked;
  for (const auto& [v, fv] : value) {
    f.vertices.push_back(v);
    f.values.push_back(fv);
  }
  f.sup = std::max(1.0, *std::max_element(f.radial.begin(), f.radial.end()));
  return f;
}

// ---------------------------------------------------------------------------
// Aggregated verdict.

struct CompletenessConfig {
  std::vector<double> lambdas{-0.25, -1.0, -4.0};
  int horizon = 12;
  std::vector<double> times{0.5, 1.0, 2.0};
  std::vector<int> mass_radii;  // default: radial 4, 8, ... within the stiffness limit for model trees, 2..horizon otherwise
  double eps = 1e-6;
  std::size_t max_ball_vertices = 200000;
};

struct WitnessSummary {
  double lambda = 0;
  double sup = 0;
  double residual_max = 0;
  double bound = 0;
  bool bounded_certified = false;
  bool refused = false;
  std::string note;
};

struct MassEvidence {
  double t = 0;
  int radius = 0;
  double mass = 0;
  double gap = 0;  // |mass - mass at the previous radius|, NaN for the first
};

struct HarmonicEvidence {
  double lambda = 0;
  std::vector<int> radii;
  std::vector<double> root_values;  // v_r(x0), non-increasing in r
  bool stabilized = false;
};

struct Certificate {
  Verdict verdict = Verdict::inconclusive;
  std::vector<CriterionReport> criteria;
  std::vector<WitnessSummary> witnesses;
  std::vector<MassEvidence> mass_evidence;
  std::vector<HarmonicEvidence> harmonic_evidence;
  std::vector<std::string> conditions_exhibited;  // among "1", "1'", "2", "2'"
  bool numeric_incompleteness = false;
  bool numeric_completeness = false;
  bool consistent = true;
  std::string notes;
};

/// Aggregates criteria, witnesses and mass behavior. Only the criteria can
/// certify; everything else is recorded as numeric evidence.
inline Certificate completeness_verdict(const RootedGraph& g, const CompletenessConfig& cfg = {}) {
  Certificate cert;
  const int horizon = cfg.horizon;
  try {
    cert.criteria = criterion_sums(g, horizon);
    cert.verdict = combine(cert.criteria);
  } catch (const HorizonError& e) {
    cert.notes += std::string("criteria: ") + e.what() + "; ";
    const int h = std::min(horizon, g.horizon());
    if (h >= 1) {
      cert.criteria = criterion_sums(g, h);
      cert.verdict = combine(cert.criteria);
    }
  }

  bool all_bounded = !cfg.lambdas.empty();
  for (double lambda : cfg.lambdas) {
    WitnessSummary w;
    w.lambda = lambda;
    try {
      const int h = std::min(horizon, std::max(1, cert.criteria.empty() ? 1 : cert.criteria.front().horizon));
      const auto f = g.has_partition() ? incompleteness_witness_attached(g, lambda, h) : build_subharmonic(g, lambda, 1.0, h);
      w.sup = f.sup;
      w.residual_max = f.residual_max;
      w.bound = f.bounded_certified ? f.global_bound : f.horizon_bound;
      w.bounded_certified = f.bounded_certified;
      w.refused = f.refused;
      w.note = f.refused ? f.refusal : f.bound_certificate;
    } catch (const Error& e) {
      w.refused = true;
      w.note = e.what();
    }
    all_bounded &= w.bounded_certified && !w.refused;
    cert.witnesses.push_back(w);
  }

  // Dirichlet lambda-harmonic functions v_r (boundary value 1) at the root.
  std::vector<int> dradii;
  for (int r = 1; r <= std::min(g.horizon(), 16); ++r) {
    double count = 0;
    for (int d = 0; d <= r; ++d) count += static_cast<double>(g.sphere_indices(d).size());
    if (count > static_cast<double>(cfg.max_ball_vertices)) break;
    dradii.push_back(r);
  }
  bool harmonic_stable = !dradii.empty();
  for (double lambda : cfg.lambdas) {
    HarmonicEvidence ev;
    ev.lambda = lambda;
    for (int r : dradii) {
      const auto b = ball(g, r);
      if (b.boundary.empty()) break;
      const auto f = solve_dirichlet_lambda(g, b, lambda);
      ev.radii.push_back(r);
      ev.root_values.push_back(f.values[b.index_of(g.root())]);
    }
    const auto n = ev.root_values.size();
    ev.stabilized = n >= 2 && ev.root_values[n - 1] > 0 &&
                    (ev.root_values[n - 2] - ev.root_values[n - 1]) < 1e-3 * ev.root_values[n - 1];
    harmonic_stable &= ev.stabilized;
    cert.harmonic_evidence.push_back(std::move(ev));
  }

  // Mass along an exhaustion at the root.
  std::vector<std::vector<double>> masses;
  std::vector<int> radii = cfg.mass_radii;
  const bool radial = g.model() && !g.has_partition() && g.model()->tagged();
  if (radial) {
    if (radii.empty()) {
      const double tmax = cfg.times.empty() ? 1.0 : *std::max_element(cfg.times.begin(), cfg.times.end());
      const int top = std::min(32, radial_max_radius(*g.model(), tmax, 32));
      for (int r = 4; r <= top; r += 4) radii.push_back(r);
    }
    for (int r : radii) masses.push_back(radial_mass(*g.model(), r, cfg.times));
  } else {
    if (radii.empty())
      for (int r = 2; r <= std::min(horizon, g.horizon()); ++r) radii.push_back(r);
    std::vector<int> usable;
    for (int r : radii) {
      if (r > g.horizon()) break;
      double count = 0;
      for (int d = 0; d <= r; ++d) count += static_cast<double>(g.sphere_indices(d).size());
      if (count > static_cast<double>(cfg.max_ball_vertices)) break;
      usable.push_back(r);
    }
    radii = usable;
    if (!radii.empty()) {
      ExhaustionOptions opt;
      opt.eps = cfg.eps;
      const auto ex = exhaustion(g, g.root(), cfg.times, radii, opt);
      masses = ex.masses;
    }
  }
  std::vector<bool> deficit_at_t(cfg.times.size(), false);
  bool shrinking_everywhere = masses.size() >= 3;
  for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
    int consecutive = 0;
    for (std::size_t level = 0; level < masses.size(); ++level) {
      MassEvidence ev;
      ev.t = cfg.times[ti];
      ev.radius = radii[level];
      ev.mass = masses[level][ti];
      ev.gap = level == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : std::abs(masses[level][ti] - masses[level - 1][ti]);
      cert.mass_evidence.push_back(ev);
      if (level == 0) continue;
      const double deficit = 1.0 - ev.mass;
      consecutive = deficit > 10.0 * std::max(ev.gap, cfg.eps) ? consecutive + 1 : 0;
      if (consecutive >= 2) deficit_at_t[ti] = true;
    }
    if (masses.size() >= 3) {
      const auto n = masses.size();
      const double g1 = std::abs(masses[n - 1][ti] - masses[n - 2][ti]);
      const double g0 = std::abs(masses[n - 2][ti] - masses[n - 3][ti]);
      const double deficit = 1.0 - masses[n - 1][ti];
      shrinking_everywhere &= g1 <= g0 && deficit <= 10.0 * std::max(g1, cfg.eps);
    }
  }
  const bool any_deficit = std::any_of(deficit_at_t.begin(), deficit_at_t.end(), [](bool b) { return b; });
  const bool all_deficit = !deficit_at_t.empty() && std::all_of(deficit_at_t.begin(), deficit_at_t.end(), [](bool b) { return b; });
  cert.numeric_incompleteness = any_deficit;
  cert.numeric_completeness = shrinking_everywhere && !any_deficit;

  if (any_deficit) cert.conditions_exhibited.push_back("1");
  if (all_deficit) cert.conditions_exhibited.push_back("1'");
  if (harmonic_stable) cert.conditions_exhibited.push_back("2");
  if (all_bounded) cert.conditions_exhibited.push_back("2'");

  if (cert.verdict == Verdict::complete_certified) cert.consistent = !any_deficit && !all_bounded;
  if (cert.verdict == Verdict::incomplete_certified) cert.consistent = !cert.numeric_completeness;
  if (radial) cert.notes += "mass evidence from the radial reduction at the root; ";
  cert.notes += "mass, witness and harmonic entries are numeric evidence, not proofs";
  return cert;
}

}  // namespace graphheat

#endif  // GRAPHHEAT_COMPLETENESS_HPP
