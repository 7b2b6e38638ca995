#ifndef GRAPHHEAT_HEAT_KERNEL_HPP
#define GRAPHHEAT_HEAT_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "graphheat/expm.hpp"
#include "graphheat/graph.hpp"
#include "graphheat/laplacian.hpp"
#include "graphheat/model_tree.hpp"

namespace graphheat {

/// Eigenpairs of a reduced operator, ascending.
struct SpectralData {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal
};

/// Full symmetric eigendecomposition of the (dense) operator.
inline std::shared_ptr<const SpectralData> decompose(const ReducedOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.to_dense());
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  auto out = std::make_shared<SpectralData>();
  out->eigenvalues = solver.eigenvalues();
  out->eigenvectors = solver.eigenvectors();
  return out;
}

/// P_t = sum_i exp(-lambda_i t) phi_i phi_i^T as a dense matrix.
inline Eigen::MatrixXd dense_kernel(const SpectralData& sd, double t) {
  const Eigen::VectorXd w = (-t * sd.eigenvalues.array()).exp();
  return sd.eigenvectors * w.asDiagonal() * sd.eigenvectors.transpose();
}

enum class ExpmMethod { automatic, eigendecomposition, scaling_and_squaring };

inline const char* to_string(ExpmMethod m) {
  switch (m) {
    case ExpmMethod::eigendecomposition:
      return "eigendecomposition";
    case ExpmMethod::scaling_and_squaring:
      return "scaling-and-squaring";
    default:
      return "automatic";
  }
}

/// Rows p_t^r(x, .) of a Dirichlet heat kernel for a list of times, stored
/// over every vertex of the ball (boundary entries are exactly zero).
struct HeatKernelMatrix {
  VertexId source = 0;
  int radius = 0;
  std::vector<double> times;
  std::shared_ptr<const BallRestriction> ball;
  std::vector<Eigen::VectorXd> values;  // values[k][ball index]
  ExpmMethod method = ExpmMethod::automatic;
  std::shared_ptr<const SpectralData> spectral;

  std::size_t time_index(double t) const {
    for (std::size_t k = 0; k < times.size(); ++k)
      if (std::abs(times[k] - t) <= 1e-14 * std::max(1.0, std::abs(t))) return k;
    throw PreconditionError("time " + std::to_string(t) + " was not computed");
  }

  /// p_t(x, y); zero for vertices outside the ball.
  double value(double t, VertexId y) const {
    const auto k = time_index(t);
    const auto it = ball->index.find(y);
    return it == ball->index.end() ? 0.0 : values[k][static_cast<Eigen::Index>(it->second)];
  }

  double mass(double t) const { return values[time_index(t)].sum(); }
};

namespace detail {

inline Eigen::VectorXd scatter_to_ball(const ReducedOperator& op, const Eigen::VectorXd& active_values) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.ball->size()));
  for (std::size_t i = 0; i < op.active.size(); ++i)
    out[static_cast<Eigen::Index>(op.ball->index_of(op.active[i]))] = active_values[static_cast<Eigen::Index>(i)];
  return out;
}

}  // namespace detail

/// Dirichlet heat kernel p_t^r(source, .) of a physical reduced operator.
///
/// automatic uses the spectral sum when the operator has dense storage and
/// falls back to scaling-and-squaring otherwise or if the eigensolver fails.
inline HeatKernelMatrix dirichlet_kernel(const ReducedOperator& op, VertexId source, std::span<const double> times,
                                         ExpmMethod method = ExpmMethod::automatic,
                                         std::shared_ptr<const SpectralData> spectral = nullptr) {
  if (op.kind != LaplacianKind::physical)
    throw PreconditionError("heat kernels are computed for the physical Laplacian only");
  const auto src = op.find(source);
  if (!src) throw PreconditionError("source " + std::to_string(source) + " is not an interior vertex");
  for (double t : times)
    if (!(t >= 0)) throw PreconditionError("times must be non-negative");

  HeatKernelMatrix k;
  k.source = source;
  k.radius = op.ball->radius;
  k.times.assign(times.begin(), times.end());
  k.ball = op.ball;

  if (method == ExpmMethod::automatic) method = op.dense ? ExpmMethod::eigendecomposition : ExpmMethod::scaling_and_squaring;
  if (method == ExpmMethod::eigendecomposition && !spectral) {
    try {
      spectral = decompose(op);
    } catch (const NumericalError&) {
      method = ExpmMethod::scaling_and_squaring;
    }
  }
  k.method = method;

  if (method == ExpmMethod::eigendecomposition) {
    k.spectral = spectral;
    const Eigen::VectorXd row = spectral->eigenvectors.row(static_cast<Eigen::Index>(*src)).transpose();
    for (double t : times) {
      const Eigen::VectorXd w = (-t * spectral->eigenvalues.array()).exp() * row.array();
      Eigen::VectorXd p = spectral->eigenvectors * w;
      if (t == 0) {
        p.setZero();
        p[static_cast<Eigen::Index>(*src)] = 1.0;
      }
      k.values.push_back(detail::scatter_to_ball(op, p));
    }
  } else {
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.size()));
    delta[static_cast<Eigen::Index>(*src)] = 1.0;
    ExpmAction action(op.sparse);
    for (auto& p : action.apply_times(delta, times)) k.values.push_back(detail::scatter_to_ball(op, p));
  }
  return k;
}

inline double mass(const HeatKernelMatrix& k, double t) { return k.mass(t); }

/// max_y |p_{s+t}(x,y) - sum_z p_s(x,z) p_t(z,y)|, where the convolution is
/// evaluated by applying P_t to the row p_s(x, .).
inline double semigroup_check(const ReducedOperator& op, const HeatKernelMatrix& k, double s, double t) {
  const auto& ps = k.values[k.time_index(s)];
  const auto& pst = k.values[k.time_index(s + t)];
  Eigen::VectorXd row(static_cast<Eigen::Index>(op.size()));
  for (std::size_t i = 0; i < op.size(); ++i)
    row[static_cast<Eigen::Index>(i)] = ps[static_cast<Eigen::Index>(op.ball->index_of(op.active[i]))];
  Eigen::VectorXd conv;
  if (k.spectral) {
    const auto& sd = *k.spectral;
    conv = sd.eigenvectors * ((-t * sd.eigenvalues.array()).exp() * (sd.eigenvectors.transpose() * row).array()).matrix();
  } else {
    conv = ExpmAction(op.sparse).apply(row, t);
  }
  return (detail::scatter_to_ball(op, conv) - pst).lpNorm<Eigen::Infinity>();
}

struct ExhaustionOptions {
  double eps = 1e-6;
  double monotonicity_tolerance = 1e-10;
  std::optional<int> window_radius;  // default min(4, r_1 / 2)
  ExpmMethod method = ExpmMethod::automatic;
  std::size_t dense_threshold = kDefaultDenseThreshold;
  double vertex_cap = kDefaultVertexCap;
  bool parallel = false;
  bool keep_kernels = false;
};

/// Dirichlet kernels along an increasing radius schedule and their limit.
struct ExhaustionResult {
  VertexId source = 0;
  std::vector<double> times;
  std::vector<int> radii;                   // radii actually computed
  std::vector<std::vector<double>> masses;  // masses[level][time]
  std::vector<double> gaps;                 // gaps[k]: radii[k] -> radii[k+1], over the window
  int window_radius = 0;
  std::vector<VertexId> window;
  std::vector<std::vector<double>> limit;  // limit[time][window vertex], last radius
  double error_bar = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool horizon_exhausted = false;
  double worst_monotonicity = 0.0;  // min over levels of p^{r+1} - p^r (>= -tolerance)
  std::vector<HeatKernelMatrix> kernels;

  /// Masses at time t along the schedule (non-decreasing) and the last one
  /// as the limit estimate.
  std::vector<double> mass_sequence(double t) const {
    std::size_t k = 0;
    while (k < times.size() && std::abs(times[k] - t) > 1e-14 * std::max(1.0, t)) ++k;
    if (k == times.size()) throw PreconditionError("time was not computed");
    std::vector<double> out;
    for (const auto& m : masses) out.push_back(m[k]);
    return out;
  }
};

namespace detail {

/// Vertices within `radius` of `source`, in BFS order.
inline std::vector<VertexId> neighborhood(const Graph& g, VertexId source, int radius) {
  std::unordered_map<VertexId, int> dist{{source, 0}};
  std::vector<VertexId> order{source};
  for (std::size_t head = 0; head < order.size(); ++head) {
    const VertexId v = order[head];
    const int d = dist[v];
    if (d == radius) continue;
    for (auto j : g.neighbor_indices(g.index_of(v))) {
      const VertexId w = g.id(j);
      if (dist.emplace(w, d + 1).second) order.push_back(w);
    }
  }
  return order;
}

}  // namespace detail

/// Exhausts G by balls around its root and tracks p_t^r(source, .).
/// Radii past the horizon are dropped and reported via horizon_exhausted.
inline ExhaustionResult exhaustion(const RootedGraph& g, VertexId source, std::span<const double> times,
                                   std::span<const int> schedule, const ExhaustionOptions& opt = {}) {
  if (schedule.empty()) throw PreconditionError("empty radius schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1]) throw PreconditionError("radius schedule must be strictly increasing");

  ExhaustionResult res;
  res.source = source;
  res.times.assign(times.begin(), times.end());
  for (int r : schedule) {
    if (g.has_declared_horizon() && r > g.horizon()) {
      res.horizon_exhausted = true;
      break;
    }
    res.radii.push_back(r);
  }
  if (res.radii.empty()) throw HorizonError(schedule.front(), g.horizon());

  auto job = [&](int r) {
    const auto b = ball(g, r, opt.vertex_cap);
    const auto op = assemble_dirichlet(g, b, LaplacianKind::physical, opt.dense_threshold);
    return dirichlet_kernel(op, source, times, opt.method);
  };
  std::vector<HeatKernelMatrix> kernels;
  if (opt.parallel) {
    std::vector<std::future<HeatKernelMatrix>> futures;
    for (int r : res.radii) futures.push_back(std::async(std::launch::async, job, r));
    for (auto& f : futures) kernels.push_back(f.get());
  } else {
    for (int r : res.radii) kernels.push_back(job(r));
  }

  res.window_radius = opt.window_radius.value_or(std::min(4, res.radii.front() / 2));
  res.window = detail::neighborhood(g.graph(), source, res.window_radius);

  for (const auto& k : kernels) {
    std::vector<double> m;
    for (const auto& v : k.values) m.push_back(v.sum());
    res.masses.push_back(std::move(m));
  }
  for (std::size_t level = 0; level + 1 < kernels.size(); ++level) {
    const auto& small = kernels[level];
    const auto& large = kernels[level + 1];
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t ti = 0; ti < times.size(); ++ti)
      for (std::size_t i = 0; i < small.ball->size(); ++i) {
        const double a = small.values[ti][static_cast<Eigen::Index>(i)];
        const double b = large.values[ti][static_cast<Eigen::Index>(large.ball->index_of(small.ball->all[i]))];
        worst = std::min(worst, b - a);
      }
    res.worst_monotonicity = std::min(res.worst_monotonicity, worst);
    if (worst < -opt.monotonicity_tolerance)
      throw NumericalError("exhaustion is not monotone between radii " + std::to_string(small.radius) + " and " +
                           std::to_string(large.radius));
    double gap = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti)
      for (auto y : res.window) gap = std::max(gap, std::abs(large.value(times[ti], y) - small.value(times[ti], y)));
    res.gaps.push_back(gap);
  }
  const auto& last = kernels.back();
  for (double t : times) {
    std::vector<double> row;
    for (auto y : res.window) row.push_back(last.value(t, y));
    res.limit.push_back(std::move(row));
  }
  if (!res.gaps.empty()) {
    res.error_bar = res.gaps.back();
    res.converged = res.gaps.back() < opt.eps;
  }
  if (opt.keep_kernels) res.kernels = std::move(kernels);
  return res;
}

// ---------------------------------------------------------------------------
// Model trees: radial reduction.
//
// On T_n the root row rho_t(r) = p_t(x0, x), x in S_r, solves the heat
// equation of the birth-death operator on sphere indices
//   (L u)(0) = n(0) (u(0) - u(1))
//   (L u)(r) = n(r) (u(r) - u(r+1)) + (u(r) - u(r-1)),  r >= 1,
// with u(R) = 0 on the Dirichlet sphere. exp(-tL) has entries in [0, 1]
// (it is the level process of the walk), so the Padé route is accurate in
// absolute terms even when |S_r| is astronomically large.

struct RadialProfile {
  std::string context;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[time][r]
};

/// Largest t ||L||_1 accepted by the Padé route. Its absolute error grows
/// like 1e-16 t ||L||_1, and geometric rules reach this limit near R = 25.
inline constexpr double kRadialStiffnessLimit = 134217728.0;  // 2^27

/// The radial operator L on levels 0..R-1.
inline Eigen::MatrixXd radial_generator(const ModelTreeSpec& spec, int radius) {
  if (radius < 1) throw PreconditionError("radial radius must be >= 1");
  const auto n = static_cast<Eigen::Index>(radius);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double branching = spec.n(static_cast<int>(r));
    l(r, r) = r == 0 ? branching : branching + 1.0;
    if (r + 1 < n) l(r, r + 1) = -branching;
    if (r > 0) l(r, r - 1) = -1.0;
  }
  return l;
}

namespace detail {

inline void check_stiffness(const Eigen::MatrixXd& l, std::span<const double> times) {
  const double norm = l.cwiseAbs().colwise().sum().maxCoeff();
  for (double t : times)
    if (t * norm > kRadialStiffnessLimit)
      throw NumericalError("radial generator too stiff for the Padé route (t ||L|| = " + std::to_string(t * norm) +
                           "); lower the radius");
}

}  // namespace detail

/// Largest radius (at most max_radius) whose radial generator passes the
/// stiffness limit at time t.
inline int radial_max_radius(const ModelTreeSpec& spec, double t, int max_radius = 200) {
  int best = 0;
  for (int r = 1; r <= max_radius; ++r) {
    const auto l = radial_generator(spec, r);
    if (t * l.cwiseAbs().colwise().sum().maxCoeff() > kRadialStiffnessLimit) break;
    best = r;
  }
  return best;
}

enum class RadialMethod { pade, symmetric };

/// rho_t^R(r) for r = 0..R (the last entry is the Dirichlet zero).
inline RadialProfile radial_kernel(const ModelTreeSpec& spec, int radius, std::span<const double> times,
                                   RadialMethod method = RadialMethod::pade) {
  const Eigen::MatrixXd l = radial_generator(spec, radius);
  RadialProfile out;
  out.context = "model-tree kernel " + spec.describe() + " R=" + std::to_string(radius);
  out.times.assign(times.begin(), times.end());
  const auto n = l.rows();
  if (method == RadialMethod::symmetric) {
    // D L D^{-1} with D = diag(sqrt|S_r|) is symmetric tridiagonal:
    // diagonal as in L, off-diagonal -sqrt(n(r)).
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      s(r, r) = l(r, r);
      if (r + 1 < n) s(r, r + 1) = s(r + 1, r) = -std::sqrt(spec.n(static_cast<int>(r)));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    if (solver.info() != Eigen::Success) throw NumericalError("radial eigensolver failed");
    for (double t : times) {
      const Eigen::VectorXd w = (-t * solver.eigenvalues().array()).exp() *
                                solver.eigenvectors().row(0).transpose().array();
      const Eigen::VectorXd col = solver.eigenvectors() * w;
      std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
      double log_scale = 0.0;  // log sqrt|S_r|
      for (Eigen::Index r = 0; r < n; ++r) {
        row[static_cast<std::size_t>(r)] = col[r] * std::exp(-log_scale);
        log_scale += 0.5 * std::log(spec.n(static_cast<int>(r)));
      }
      if (t == 0) {
        std::fill(row.begin(), row.end(), 0.0);
        row[0] = 1.0;
      }
      out.values.push_back(std::move(row));
    }
    return out;
  }
  detail::check_stiffness(l, times);
  for (double t : times) {
    const Eigen::MatrixXd e = expm_pade(-t * l);
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
    for (Eigen::Index r = 0; r < n; ++r) row[static_cast<std::size_t>(r)] = e(r, 0);
    out.values.push_back(std::move(row));
  }
  return out;
}

/// sum_y p_t^R(x0, y) on T_n: row 0 of exp(-tL) applied to the constant 1.
inline std::vector<double> radial_mass(const ModelTreeSpec& spec, int radius, std::span<const double> times) {
  const Eigen::MatrixXd l = radial_generator(spec, radius);
  detail::check_stiffness(l, times);
  std::vector<double> out;
  for (double t : times) out.push_back(expm_pade(-t * l).row(0).sum());
  return out;
}

/// Radial exhaustion of a model tree at the root: masses and kernel gaps
/// along a radius schedule, at essentially no cost per radius.
struct RadialExhaustion {
  std::vector<double> times;
  std::vector<int> radii;
  std::vector<std::vector<double>> masses;  // masses[level][time]
  std::vector<double> mass_gaps;            // max over t, consecutive levels
  std::vector<double> kernel_gaps;          // max over t and r <= window
  int window_radius = 0;
  bool converged = false;
};

inline RadialExhaustion radial_exhaustion(const ModelTreeSpec& spec, std::span<const double> times,
                                          std::span<const int> schedule, double eps = 1e-6) {
  if (schedule.empty()) throw PreconditionError("empty radius schedule");
  RadialExhaustion out;
  out.times.assign(times.begin(), times.end());
  out.window_radius = std::min(4, schedule.front() / 2);
  std::vector<RadialProfile> profiles;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i > 0 && schedule[i] <= schedule[i - 1]) throw PreconditionError("radius schedule must be strictly increasing");
    out.radii.push_back(schedule[i]);
    out.masses.push_back(radial_mass(spec, schedule[i], times));
    profiles.push_back(radial_kernel(spec, schedule[i], times));
  }
  for (std::size_t i = 0; i + 1 < out.radii.size(); ++i) {
    double mg = 0.0, kg = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      mg = std::max(mg, std::abs(out.masses[i + 1][k] - out.masses[i][k]));
      for (int r = 0; r <= out.window_radius; ++r)
        kg = std::max(kg, std::abs(profiles[i + 1].values[k][static_cast<std::size_t>(r)] -
                                   profiles[i].values[k][static_cast<std::size_t>(r)]));
    }
    out.mass_gaps.push_back(mg);
    out.kernel_gaps.push_back(kg);
  }
  out.converged = !out.mass_gaps.empty() && out.mass_gaps.back() < eps && out.kernel_gaps.back() < eps;
  return out;
}

// ---------------------------------------------------------------------------
// Comparison with a model tree.

enum class ComparisonDirection { lower, upper };

struct HypothesisViolation {
  VertexId vertex = 0;
  int r = 0;
  std::uint64_t m_out = 0;
  std::uint64_t m_in = 0;
  double branching = 0;
  std::string reason;
};

struct ComparisonReport {
  ComparisonDirection direction = ComparisonDirection::lower;
  int radius = 0;
  bool hypothesis_ok = false;
  std::optional<HypothesisViolation> violation;
  bool compared = false;
  bool holds = false;
  /// min over t and x of the signed margin: p - rho (lower) or rho - p (upper).
  double worst_margin = std::numeric_limits<double>::infinity();
  VertexId worst_vertex = 0;
  double worst_time = 0;
  double max_abs_difference = 0;
};

/// Checks the valence hypothesis on B_R(source) and, if it holds, compares
/// p_t^R(source, x) with rho_t^R(r(x)) at every x of the ball. Both kernels
/// carry Dirichlet conditions at the same radius R, for which the maximum
/// principle already yields the inequality; letting R grow gives the limit
/// statement.
inline ComparisonReport compare_with_model(const RootedGraph& g, VertexId source, const ModelTreeSpec& spec,
                                           std::span<const double> times, ComparisonDirection direction, int radius,
                                           double slack = 1e-9) {
  ComparisonReport rep;
  rep.direction = direction;
  rep.radius = radius;
  const int offset = g.distance(source);
  if (offset < 0) throw PreconditionError("source is not connected to the root");
  if (g.has_declared_horizon() && radius + offset > g.horizon()) throw HorizonError(radius + offset, g.horizon());
  const RootedGraph centered = source == g.root() ? g : g.rerooted(source, std::nullopt);
  const auto b = ball(centered, radius);

  for (std::size_t i = 0; i < b.size(); ++i) {
    const VertexId x = b.all[i];
    const int r = b.dist[i];
    const auto [out, in] = centered.radial_degrees_at(centered.graph().index_of(x));
    const double n = spec.n(r);
    std::string reason;
    if (direction == ComparisonDirection::lower) {
      if (static_cast<double>(out) > n) reason = "m_{+1}(x) > n(r)";
    } else {
      if (static_cast<double>(out) < n) reason = "m_{+1}(x) < n(r)";
      else if (r >= 1 && in != 1) reason = "m_{-1}(x) != 1";
    }
    if (!reason.empty()) {
      rep.violation = HypothesisViolation{x, r, out, in, n, reason};
      return rep;
    }
  }
  rep.hypothesis_ok = true;

  const auto op = assemble_dirichlet(centered, b);
  const auto kernel = dirichlet_kernel(op, source, times);
  const auto rho = radial_kernel(spec, radius, times);
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double p = kernel.values[k][static_cast<Eigen::Index>(i)];
      const double model = rho.values[k][static_cast<std::size_t>(b.dist[i])];
      const double margin = direction == ComparisonDirection::lower ? p - model : model - p;
      rep.max_abs_difference = std::max(rep.max_abs_difference, std::abs(p - model));
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_vertex = b.all[i];
        rep.worst_time = times[k];
      }
    }
  rep.compared = true;
  rep.holds = rep.worst_margin >= -slack;
  return rep;
}

}  // namespace graphheat

#endif  // GRAPHHEAT_HEAT_KERNEL_HPP
