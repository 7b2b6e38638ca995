#ifndef GRAPHHEAT_EXPM_HPP
#define GRAPHHEAT_EXPM_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "graphheat/error.hpp"

namespace graphheat {

/// Maximum absolute column sum.
inline double norm1(const Eigen::SparseMatrix<double>& a) {
  double best = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

/// Action of exp(-t A) on a vector by scaling and squaring in action form:
/// exp(-tA) v = (exp(-tA/s))^s v with s chosen so that ||tA/s||_1 <= 1/2.
/// Each factor is a truncated Taylor series; terms are added until the
/// remainder bound ||term|| * (1/2) / (1 - 1/2) drops below 1e-17 ||v||,
/// far under the 1e-12 tail budget.
class ExpmAction {
 public:
  explicit ExpmAction(const Eigen::SparseMatrix<double>& a) : a_(a), norm_(norm1(a)) {}

  Eigen::VectorXd apply(const Eigen::VectorXd& v, double t) const {
    if (t < 0) throw PreconditionError("negative time");
    if (t == 0 || norm_ == 0) return v;
    const double theta = 0.5;
    const auto steps = static_cast<long>(std::ceil(t * norm_ / theta));
    const double h = t / static_cast<double>(steps);
    Eigen::VectorXd x = v;
    for (long s = 0; s < steps; ++s) x = step(x, h);
    return x;
  }

  /// exp(-t_i A) v for each time; times need not be sorted.
  std::vector<Eigen::VectorXd> apply_times(const Eigen::VectorXd& v, std::span<const double> times) const {
    std::vector<std::size_t> order(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });
    std::vector<Eigen::VectorXd> out(times.size());
    Eigen::VectorXd current = v;
    double now = 0.0;
    for (auto i : order) {
      current = apply(current, times[i] - now);
      now = times[i];
      out[i] = current;
    }
    return out;
  }

  long taylor_terms_last_step() const { return last_terms_; }

 private:
  Eigen::VectorXd step(const Eigen::VectorXd& v, double h) const {
    Eigen::VectorXd sum = v;
    Eigen::VectorXd term = v;
    const double scale = std::max(v.lpNorm<Eigen::Infinity>(), 1e-300);
    long k = 1;
    for (; k <= 60; ++k) {
      term = (a_ * term) * (-h / static_cast<double>(k));
      sum += term;
      if (term.lpNorm<Eigen::Infinity>() <= 1e-17 * scale) break;
    }
    if (k > 60) throw NumericalError("Taylor series did not converge");
    last_terms_ = k;
    return sum;
  }

  const Eigen::SparseMatrix<double>& a_;
  double norm_;
  mutable long last_terms_ = 0;
};

/// Dense matrix exponential exp(A), Padé degree 13 with scaling and
/// squaring (Higham 2005 coefficients). Intended for small non-symmetric
/// generators whose entries stay in [0, 1] after exponentiation.
inline Eigen::MatrixXd expm_pade(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw PreconditionError("expm of a non-square matrix");
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > theta13) s = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  const Eigen::MatrixXd as = a / std::ldexp(1.0, s);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = as * as;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a4 * a2;
  const Eigen::MatrixXd u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Eigen::MatrixXd v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

}  // namespace graphheat

#endif  // GRAPHHEAT_EXPM_HPP
