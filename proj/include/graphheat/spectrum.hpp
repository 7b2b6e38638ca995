#ifndef GRAPHHEAT_SPECTRUM_HPP
#define GRAPHHEAT_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "graphheat/completeness.hpp"
#include "graphheat/graph.hpp"
#include "graphheat/laplacian.hpp"
#include "graphheat/model_tree.hpp"

namespace graphheat {

struct GroundState {
  double lambda0 = 0;
  double lambda1 = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd ground;  // unit norm, non-negative, over op.active
  bool positive = false;   // every entry > 0
  bool simple = false;     // lambda1 - lambda0 clearly above rounding
  std::string method;
};

namespace detail {

inline void orient(Eigen::VectorXd& v) {
  if (v.sum() < 0) v = -v;
  v.normalize();
}

/// Inverse iteration with a fixed shift below the spectrum; optional
/// deflation against `against`.
inline std::pair<double, Eigen::VectorXd> inverse_iteration(
    const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& solver, const Eigen::SparseMatrix<double>& a,
    const Eigen::VectorXd* against, Eigen::VectorXd start) {
  auto project = [&](Eigen::VectorXd& v) {
    if (against) v -= against->dot(v) * *against;
    v.normalize();
  };
  project(start);
  double rq = start.dot(a * start);
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXd next = solver.solve(start);
    project(next);
    const double rq_next = next.dot(a * next);
    const double residual = (a * next - rq_next * next).norm();
    start = std::move(next);
    const bool settled = std::abs(rq_next - rq) <= 1e-15 * std::max(1.0, std::abs(rq_next));
    rq = rq_next;
    if (residual <= 1e-11 * std::max(1.0, std::abs(rq)) || settled) break;
  }
  return {rq, start};
}

}  // namespace detail

/// Bottom of the spectrum of a reduced operator with its ground vector.
/// Dense operators go through a full symmetric eigensolve; sparse ones use
/// inverse iteration, shifted by -1 when there is no Dirichlet vertex.
inline GroundState lambda0(const ReducedOperator& op) {
  GroundState gs;
  const auto n = static_cast<Eigen::Index>(op.size());
  if (n == 0) throw PreconditionError("empty operator");
  if (op.dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*op.dense);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
    gs.lambda0 = es.eigenvalues()[0];
    if (n > 1) gs.lambda1 = es.eigenvalues()[1];
    gs.ground = es.eigenvectors().col(0);
    gs.method = "eigendecomposition";
  } else {
    // Dirichlet conditions make the operator definite, so no shift is needed.
    const bool definite = op.has_boundary() || !op.removed.empty();
    Eigen::SparseMatrix<double> shifted = op.sparse;
    if (!definite)
      for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += 1.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
    if (solver.info() != Eigen::Success) throw NumericalError("factorization failed");
    auto [l0, v0] = detail::inverse_iteration(solver, op.sparse, nullptr, Eigen::VectorXd::Ones(n));
    gs.lambda0 = l0;
    gs.ground = v0;
    if (n > 1) {
      Eigen::VectorXd start = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
      detail::orient(v0);
      auto [l1, v1] = detail::inverse_iteration(solver, op.sparse, &v0, start);
      gs.lambda1 = l1;
    }
    gs.method = "inverse-iteration";
  }
  detail::orient(gs.ground);
  // Entries of the ground state can round to tiny negatives far from the root.
  gs.positive = (gs.ground.array() > 0).all();
  gs.simple = n == 1 || (gs.lambda1 - gs.lambda0) > 1e-12;
  return gs;
}

// ---------------------------------------------------------------------------
// Isoperimetric constant by enumeration.

struct CheegerResult {
  double alpha = std::numeric_limits<double>::infinity();  // min L(dD) / A(D) seen
  std::vector<VertexId> argmin;
  std::uint64_t sets_enumerated = 0;
  std::size_t universe = 0;
  int max_set_size = 0;
  std::string scope = "exact-on-enumeration-set";
};

/// Minimizes L(dD)/A(D) over connected D of at most `max_set_size`
/// vertices inside the working ball B_R minus A, with L the number of edges
/// leaving D and A(D) = sum of valences. Connected sets are enough: the ratio
/// of a disjoint union is at least the smaller ratio of its parts.
///
/// The result is exact on the enumeration set, so it is an upper bound for
/// the constant of G \ A. Throws BudgetError when more than `budget` sets
/// would be needed.
inline CheegerResult cheeger_exact(const RootedGraph& g, std::span<const VertexId> removed, int working_radius,
                                   int max_set_size = 12, std::uint64_t budget = 1'000'000) {
  if (max_set_size < 1) throw PreconditionError("max set size must be >= 1");
  g.check_radius(working_radius);
  const auto& graph = g.graph();
  std::unordered_set<VertexId> drop(removed.begin(), removed.end());

  // Universe in (distance, id) order, as local indices.
  std::vector<std::size_t> uni;
  for (int d = 0; d <= working_radius; ++d)
    for (auto i : g.sphere_indices(d))
      if (!drop.count(graph.id(i))) uni.push_back(i);
  std::unordered_map<std::size_t, std::uint32_t> local;
  for (std::size_t k = 0; k < uni.size(); ++k) local.emplace(uni[k], static_cast<std::uint32_t>(k));
  const std::size_t n = uni.size();
  std::vector<std::vector<std::uint32_t>> nbr(n);
  std::vector<double> valence(n);
  for (std::size_t k = 0; k < n; ++k) {
    valence[k] = static_cast<double>(graph.degree_at(uni[k]));
    for (auto j : graph.neighbor_indices(uni[k]))
      if (const auto it = local.find(j); it != local.end()) nbr[k].push_back(it->second);
  }

  CheegerResult res;
  res.universe = n;
  res.max_set_size = max_set_size;
  std::vector<std::uint32_t> sub;
  std::vector<std::uint32_t> best;
  std::vector<int> touch(n, 0);  // members of sub or adjacent to it
  std::vector<char> in_sub(n, 0);

  // ESU: each connected set is produced exactly once, from its smallest
  // member, by extending only with exclusive neighbors.
  auto record = [&](double boundary, double volume) {
    if (++res.sets_enumerated > budget)
      throw BudgetError(budget);
    const double ratio = boundary / volume;
    if (ratio < res.alpha) {
      res.alpha = ratio;
      best = sub;
    }
  };
  auto add = [&](std::uint32_t w, int sign) {
    touch[w] += sign;
    for (auto u : nbr[w]) touch[u] += sign;
  };
  auto extend = [&](auto&& self, std::vector<std::uint32_t> ext, std::uint32_t v, double boundary,
                    double volume) -> void {
    record(boundary, volume);
    if (static_cast<int>(sub.size()) == max_set_size) return;
    while (!ext.empty()) {
      const auto w = ext.back();
      ext.pop_back();
      std::vector<std::uint32_t> next = ext;
      for (auto u : nbr[w])
        if (u > v && touch[u] == 0) next.push_back(u);
      int inside = 0;
      for (auto u : nbr[w]) inside += in_sub[u];
      sub.push_back(w);
      in_sub[w] = 1;
      add(w, +1);
      self(self, std::move(next), v, boundary + valence[w] - 2.0 * inside, volume + valence[w]);
      add(w, -1);
      in_sub[w] = 0;
      sub.pop_back();
    }
  };
  for (std::uint32_t v = 0; v < n; ++v) {
    std::vector<std::uint32_t> ext;
    for (auto u : nbr[v])
      if (u > v) ext.push_back(u);
    sub.assign(1, v);
    in_sub[v] = 1;
    add(v, +1);
    extend(extend, std::move(ext), v, valence[v], valence[v]);
    add(v, -1);
    in_sub[v] = 0;
  }
  for (auto k : best) res.argmin.push_back(graph.id(uni[k]));
  std::sort(res.argmin.begin(), res.argmin.end());
  return res;
}

// ---------------------------------------------------------------------------
// Curvature-type bounds.

struct CurvatureResult {
  double c = std::numeric_limits<double>::infinity();  // inf (m+1 - m-1)/m
  VertexId argmin = 0;
  double min_valence = std::numeric_limits<double>::infinity();  // inf m over the checked set
  int horizon = 0;
  std::uint64_t checked = 0;
  bool hypothesis_ok = false;  // c > 0
  std::string source;          // "materialized", "rule" or both
};

/// c = inf over x in G \ A with r(x) <= horizon of (m+1(x) - m-1(x)) / m(x).
/// Spheres past the materialized horizon are filled in from a trusted
/// branching rule (plain model trees only).
inline CurvatureResult curvature_bound(const RootedGraph& g, std::span<const VertexId> removed, int horizon) {
  if (horizon < 0) throw PreconditionError("negative horizon");
  const auto& graph = g.graph();
  std::unordered_set<VertexId> drop(removed.begin(), removed.end());
  CurvatureResult res;
  res.horizon = horizon;
  const int materialized = std::min(horizon, g.horizon());
  for (int d = 0; d <= materialized; ++d)
    for (auto i : g.sphere_indices(d)) {
      const VertexId v = graph.id(i);
      if (drop.count(v)) continue;
      const auto [out, in] = g.radial_degrees_at(i);
      const double m = static_cast<double>(graph.degree_at(i));
      const double ratio = (static_cast<double>(out) - static_cast<double>(in)) / m;
      if (ratio < res.c) {
        res.c = ratio;
        res.argmin = v;
      }
      res.min_valence = std::min(res.min_valence, m);
      ++res.checked;
    }
  res.source = "materialized";
  if (horizon > materialized) {
    const SphereStatsTable table(g, horizon);  // throws HorizonError without a trusted rule
    if (g.has_partition()) throw HorizonError(horizon, g.horizon());
    for (int r = materialized + 1; r < table.available(); ++r) {
      const double n = g.model()->n(r);
      const double ratio = (n - 1.0) / (n + 1.0);
      if (ratio < res.c) {
        res.c = ratio;
        res.argmin = tree_vertex(r, 0);
      }
      res.min_valence = std::min(res.min_valence, n + 1.0);
    }
    res.source = "materialized+rule";
  }
  res.hypothesis_ok = res.c > 0 && std::isfinite(res.c);
  return res;
}

struct SpectralBounds {
  CurvatureResult curvature;
  double bound_bounded = 0;   // c^2 / 2
  double bound_physical = 0;  // m c^2 / 2
  std::vector<int> radii;
  std::vector<double> lambda0_bounded;
  std::vector<double> lambda0_physical;
  bool respected = true;  // numeric lambda0 >= bound - 1e-9 at every radius
  std::optional<CheegerResult> cheeger;
  Eigen::VectorXd ground;  // physical ground state at the largest radius
  std::vector<VertexId> ground_vertices;
};

/// Curvature lower bounds for lambda0(G \ A) checked against Dirichlet
/// truncations B_R \ A. The truncations only involve vertices inside B_R,
/// so c is taken over the largest radius.
inline SpectralBounds lambda0_lower_bounds(const RootedGraph& g, std::span<const VertexId> removed,
                                           std::vector<int> radii, std::optional<int> cheeger_radius = std::nullopt,
                                           int cheeger_max_size = 12) {
  if (radii.empty()) throw PreconditionError("no radii");
  std::sort(radii.begin(), radii.end());
  SpectralBounds sb;
  sb.curvature = curvature_bound(g, removed, radii.back());
  if (!sb.curvature.hypothesis_ok) throw PreconditionError("curvature constant c is not positive");
  const double c = sb.curvature.c;
  sb.bound_bounded = c * c / 2.0;
  sb.bound_physical = sb.curvature.min_valence * c * c / 2.0;
  for (int r : radii) {
    const auto b = ball(g, r);
    const auto bd = assemble_complement(g, removed, b, LaplacianKind::bounded);
    const auto ph = assemble_complement(g, removed, b, LaplacianKind::physical);
    const auto gb = lambda0(bd);
    const auto gp = lambda0(ph);
    sb.radii.push_back(r);
    sb.lambda0_bounded.push_back(gb.lambda0);
    sb.lambda0_physical.push_back(gp.lambda0);
    sb.respected &= gb.lambda0 >= sb.bound_bounded - 1e-9 && gp.lambda0 >= sb.bound_physical - 1e-9;
    if (r == radii.back()) {
      sb.ground = gp.ground;
      sb.ground_vertices = ph.active;
    }
  }
  if (cheeger_radius) sb.cheeger = cheeger_exact(g, removed, *cheeger_radius, cheeger_max_size);
  return sb;
}

// ---------------------------------------------------------------------------
// Essential spectrum.

struct EssSpectrumCertificate {
  double c = 0;
  bool c_positive = false;
  std::vector<double> outer_min_valence;  // m_c(r) = inf_{x outside B_r} m(x), r = 0..horizon-1
  std::vector<double> lower_bounds;       // m_c(r) c^2 / 2
  bool empty_certified = false;
  std::string growth_rule;
  std::string reason;
};

/// Certifies sigma_ess(Lap) = empty from c > 0 and m_c(r) -> infinity.
/// Divergence is only accepted from a trusted unbounded branching rule.
inline EssSpectrumCertificate ess_spectrum_certificate(const RootedGraph& g, int horizon) {
  if (horizon < 1) throw PreconditionError("horizon must be >= 1");
  EssSpectrumCertificate cert;
  const auto curv = curvature_bound(g, {}, horizon);
  cert.c = curv.c;
  cert.c_positive = curv.hypothesis_ok;
  const SphereStatsTable table(g, horizon);
  // Valence minima per sphere, then suffix minima.
  std::vector<double> sphere_min;
  for (int r = 0; r < table.available(); ++r) sphere_min.push_back(static_cast<double>(table.at(r).min_valence));
  const bool trusted = table.model_trusted() && !g.has_partition();
  for (int r = 0; r + 1 < static_cast<int>(sphere_min.size()); ++r) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t s = static_cast<std::size_t>(r) + 1; s < sphere_min.size(); ++s) m = std::min(m, sphere_min[s]);
    // Beyond the horizon only a nondecreasing rule controls the infimum.
    if (trusted && table.model()->nondecreasing()) m = std::min(m, table.model()->n(r + 1) + 1.0);
    cert.outer_min_valence.push_back(m);
    cert.lower_bounds.push_back(cert.c_positive ? m * cert.c * cert.c / 2.0 : 0.0);
  }
  if (trusted) cert.growth_rule = table.model()->describe();
  if (!cert.c_positive) {
    cert.reason = "curvature constant is not positive";
  } else if (!trusted || !table.model()->tagged()) {
    cert.reason = "no closed-form rule for the valence growth";
  } else if (!table.model()->unbounded() || !table.model()->nondecreasing()) {
    cert.reason = "valence stays bounded along the rule";
  } else {
    // c over the horizon covers the rule's infimum: (n-1)/(n+1) grows with n.
    cert.empty_certified = true;
    cert.reason = "c > 0 and m_c(r) -> infinity by the branching rule";
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Probe for positive lambda-harmonic functions above lambda0.

struct NonexistenceProbe {
  double lambda = 0;
  double lambda0 = 0;
  std::size_t negative_pivots = 0;
  bool indefinite = false;      // Lap_r - lambda has a negative direction
  double min_solution = 0;      // min of the Dirichlet solution with boundary value 1
  bool positive_solution = false;
  bool consistent = false;      // lambda > lambda0 <=> indefinite <=> no positive solution
};

/// Inertia of Lap_r - lambda on a ball, read off the LDLT pivots. For
/// lambda > lambda0(B_r) the form is indefinite and no positive
/// lambda-harmonic function can be built on B_r.
inline NonexistenceProbe lambda_harmonic_nonexistence_probe(const RootedGraph& g, const BallRestriction& b,
                                                            double lambda) {
  if (b.boundary.empty()) throw PreconditionError("ball has no boundary");
  NonexistenceProbe p;
  p.lambda = lambda;
  auto op = assemble_dirichlet(g, b, LaplacianKind::physical);
  p.lambda0 = lambda0(op).lambda0;
  Eigen::SparseMatrix<double> a = op.sparse;
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) -= lambda;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("factorization failed");
  const auto d = solver.vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i) p.negative_pivots += d[i] < 0;
  p.indefinite = p.negative_pivots > 0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.rows());
  const auto& graph = g.graph();
  for (std::size_t i = 0; i < op.active.size(); ++i)
    for (auto j : graph.neighbor_indices(graph.index_of(op.active[i])))
      if (b.contains(graph.id(j)) && b.is_boundary(graph.id(j))) rhs[static_cast<Eigen::Index>(i)] += 1.0;
  const Eigen::VectorXd v = solver.solve(rhs);
  p.min_solution = v.minCoeff();
  p.positive_solution = p.min_solution > 0;
  const bool above = lambda > p.lambda0;
  p.consistent = above == p.indefinite && (above ? !p.positive_solution : p.positive_solution);
  return p;
}

}  // namespace graphheat

#endif  // GRAPHHEAT_SPECTRUM_HPP
