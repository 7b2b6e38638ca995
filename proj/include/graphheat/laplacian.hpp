#ifndef GRAPHHEAT_LAPLACIAN_HPP
#define GRAPHHEAT_LAPLACIAN_HPP

#include <cmath>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "graphheat/graph.hpp"

namespace graphheat {

/// physical:  (Lap f)(x) = sum_{y~x} (f(x) - f(y))
/// bounded:   (Lap_bd f)(x) = (Lap f)(x) / m(x), stored in the symmetric
///            form D^{-1/2} Lap D^{-1/2}, which has the same spectrum.
enum class LaplacianKind { physical, bounded };

inline constexpr std::size_t kDefaultDenseThreshold = 3000;

/// A Laplacian restricted to an active vertex set with zero (Dirichlet)
/// values everywhere else.
///
/// For a ball, the active set is int B_r. For a complement G \ A inside a
/// working ball B_R it is int B_R \ A; the outer truncation is Dirichlet
/// too, so every spectral quantity of such an operator is an upper bound
/// that decreases as R grows.
struct ReducedOperator {
  LaplacianKind kind = LaplacianKind::physical;
  std::shared_ptr<const BallRestriction> ball;
  std::vector<VertexId> active;
  std::unordered_map<VertexId, std::size_t> active_index;
  std::vector<double> valence;  // m(x), parallel to `active`
  Eigen::SparseMatrix<double> sparse;
  std::optional<Eigen::MatrixXd> dense;
  std::vector<VertexId> removed;  // A, empty for plain Dirichlet operators
  bool upper_bound = false;       // true for complement operators

  std::size_t size() const noexcept { return active.size(); }
  bool is_dirichlet() const noexcept { return removed.empty() && !upper_bound; }
  bool has_boundary() const noexcept { return ball && !ball->boundary.empty(); }
  std::optional<std::size_t> find(VertexId v) const {
    const auto it = active_index.find(v);
    if (it == active_index.end()) return std::nullopt;
    return it->second;
  }

  Eigen::MatrixXd to_dense() const {
    if (dense) return *dense;
    return Eigen::MatrixXd(sparse);
  }
};

namespace detail {

inline ReducedOperator assemble_over(const RootedGraph& g, std::shared_ptr<const BallRestriction> ball,
                                     std::vector<VertexId> active, LaplacianKind kind,
                                     std::size_t dense_threshold) {
  ReducedOperator op;
  op.kind = kind;
  op.ball = std::move(ball);
  op.active = std::move(active);
  const auto& graph = g.graph();
  const std::size_t n = op.active.size();
  op.active_index.reserve(n);
  op.valence.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    op.active_index.emplace(op.active[i], i);
    op.valence[i] = static_cast<double>(graph.degree(op.active[i]));
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mi = op.valence[i];
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i),
                          kind == LaplacianKind::physical ? mi : 1.0);
    for (auto j : graph.neighbor_indices(graph.index_of(op.active[i]))) {
      const auto it = op.active_index.find(graph.id(j));
      if (it == op.active_index.end()) continue;
      const double value = kind == LaplacianKind::physical
                               ? -1.0
                               : -1.0 / std::sqrt(mi * op.valence[it->second]);
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(it->second), value);
    }
  }
  op.sparse.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  op.sparse.setFromTriplets(triplets.begin(), triplets.end());
  op.sparse.makeCompressed();
  if (n <= dense_threshold) op.dense = Eigen::MatrixXd(op.sparse);
  return op;
}

}  // namespace detail

/// Dirichlet Laplacian on int B_r: rows and columns are interior vertices;
/// edges from the interior to the boundary only contribute to the diagonal.
inline ReducedOperator assemble_dirichlet(const RootedGraph& g, const BallRestriction& ball,
                                          LaplacianKind kind = LaplacianKind::physical,
                                          std::size_t dense_threshold = kDefaultDenseThreshold) {
  if (ball.interior.empty()) throw PreconditionError("ball has an empty interior");
  return detail::assemble_over(g, std::make_shared<const BallRestriction>(ball), ball.interior,
                               kind, dense_threshold);
}

/// Reduced Laplacian of G \ A, truncated at the working ball B_R.
inline ReducedOperator assemble_complement(const RootedGraph& g, std::span<const VertexId> removed,
                                           const BallRestriction& working_ball,
                                           LaplacianKind kind = LaplacianKind::physical,
                                           std::size_t dense_threshold = kDefaultDenseThreshold) {
  std::unordered_set<VertexId> drop;
  for (auto v : removed) {
    if (!working_ball.contains(v))
      throw PreconditionError("removed vertex " + std::to_string(v) + " lies outside the working ball");
    drop.insert(v);
  }
  std::vector<VertexId> active;
  for (auto v : working_ball.interior)
    if (!drop.count(v)) active.push_back(v);
  if (active.empty()) throw PreconditionError("complement operator has no active vertices");
  auto op = detail::assemble_over(g, std::make_shared<const BallRestriction>(working_ball),
                                  std::move(active), kind, dense_threshold);
  op.removed.assign(drop.begin(), drop.end());
  std::sort(op.removed.begin(), op.removed.end());
  op.upper_bound = !op.removed.empty();
  return op;
}

/// Physical Laplacian applied to a function given on the ball and beyond:
/// (Lap f)(x) for x in the ball, using every neighbor of x in G.
template <class F>
double apply_laplacian(const RootedGraph& g, VertexId x, F&& f) {
  const auto& graph = g.graph();
  const double fx = f(x);
  double sum = 0.0;
  for (auto j : graph.neighbor_indices(graph.index_of(x))) sum += fx - f(graph.id(j));
  return sum;
}

struct GreenResidual {
  double lhs = 0;
  double rhs = 0;
  double residual = 0;  // |lhs - rhs|
  double scale = 0;     // sum of absolute values of all terms
  double relative() const { return scale > 0 ? residual / scale : residual; }
};

/// Evaluates both sides of the discrete Green formula on D = B_r:
///   sum_{x in D} (Lap f)(x) h(x)
///     = sum_{edges [x,y] of D} df df + sum_{x in dD, z ~ x, z not in D} (f(x) - f(z)) h(x).
/// f and h must be defined on the ball and on the neighbors of its boundary.
template <class F, class H>
GreenResidual green_identity_check(const RootedGraph& g, const BallRestriction& ball, F&& f, H&& h) {
  const auto& graph = g.graph();
  GreenResidual out;
  for (auto x : ball.all) {
    const double lap = apply_laplacian(g, x, f);
    out.lhs += lap * h(x);
    out.scale += std::abs(lap * h(x));
    const auto xi = graph.index_of(x);
    const double fx = f(x), hx = h(x);
    for (auto j : graph.neighbor_indices(xi)) {
      const VertexId y = graph.id(j);
      if (ball.contains(y)) {
        if (x < y) {
          const double term = (f(y) - fx) * (h(y) - hx);
          out.rhs += term;
          out.scale += std::abs(term);
        }
      } else {
        const double term = (fx - f(y)) * hx;
        out.rhs += term;
        out.scale += std::abs(term);
      }
    }
  }
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

/// Writes the operator in MatrixMarket coordinate format (symmetric, lower
/// triangle, 1-based), with the active vertex ids as comments.
inline void write_matrix_market(const ReducedOperator& op, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << "% kind " << (op.kind == LaplacianKind::physical ? "physical" : "bounded") << "\n";
  os << "% vertices";
  for (auto v : op.active) os << ' ' << v;
  os << "\n";
  std::size_t nnz = 0;
  for (int k = 0; k < op.sparse.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.sparse, k); it; ++it)
      if (it.row() >= it.col()) ++nnz;
  os << op.size() << ' ' << op.size() << ' ' << nnz << "\n";
  os << std::setprecision(17);
  for (int k = 0; k < op.sparse.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.sparse, k); it; ++it)
      if (it.row() >= it.col()) os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << "\n";
}

}  // namespace graphheat

#endif  // GRAPHHEAT_LAPLACIAN_HPP
