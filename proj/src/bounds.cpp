#include "fidbench/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fidbench/error.hpp"

namespace fidbench {

namespace {

constexpr double kSlackTolerance = 1e-12;
constexpr double kSimplexInputTolerance = 1e-9;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double mean_purity_of(const EnsembleMoments& m) {
  return std::min(m.mean.matrix().squaredNorm(), 1.0);
}

// Solve the stationarity system on the top-k support of a descending r.
struct SupportCandidate {
  double lambda;
  double beta;
};

SupportCandidate solve_on_support(std::span<const double> sorted_r, int k, double p) {
  double r_sum = 0.0;
  for (int i = 0; i < k; ++i) r_sum += sorted_r[i];
  double centre = r_sum / k;
  double spread = 0.0;
  for (int i = 0; i < k; ++i) spread += (sorted_r[i] - centre) * (sorted_r[i] - centre);
  // beta^2 (k-1)/k = p^2 + Q_k - R_k^2/k, the positive root.
  double beta = std::sqrt(k * (p * p + spread) / (k - 1));
  double lambda = (beta - r_sum) / k;
  return {lambda, beta};
}

}  // namespace

PureOptimum theorem1_pure_optimum(const EnsembleMoments& m) {
  if (!m.pure_support && m.p_rho != 0.0) {
    throw InvalidArgument("pure-state optimum requested for mixed-support moments (p_rho = " +
                          std::to_string(m.p_rho) + ")");
  }
  EigDecomposition e = eigh(m.mean);
  return {clamp01(e.eigenvalues(0)), DensityMatrix::pure(e.eigenvectors.col(0))};
}

double theorem2_fvg_bound(const EnsembleMoments& m) {
  double variance = m.mean_square.trace() - m.mean.matrix().squaredNorm();
  return std::min(1.0 - 0.25 * variance, 1.0);
}

AnalyticBound theorem3_analytic_bound(const EnsembleMoments& m, int d) {
  if (d < 2) throw InvalidArgument("analytic bound requires d >= 2");
  if (m.dim() != d) {
    throw InvalidArgument("moments have dimension " + std::to_string(m.dim()) + ", expected " +
                          std::to_string(d));
  }
  const double dd = d;
  double radicand = std::max(dd * (m.p_rho * m.p_rho + mean_purity_of(m)) - 1.0, 0.0);
  double bound = clamp01((1.0 + std::sqrt(dd - 1.0) * std::sqrt(radicand)) / dd);

  CMatrix centre = CMatrix::Identity(d, d) / dd;
  CMatrix sharp = centre;
  if (radicand > 0.0) {
    sharp += std::sqrt((dd - 1.0) / radicand) * (m.mean.matrix() - centre);
  }
  HermitianMatrix sigma(sharp);
  bool is_state = eigh(sigma).eigenvalues(d - 1) >= -1e-10;
  return {bound, sigma, is_state};
}

double bagan_qubit_bound(const EnsembleMoments& m) {
  if (m.dim() != 2) throw InvalidArgument("qubit bound requires d == 2");
  double radicand = std::max(2.0 * (m.p_rho * m.p_rho + mean_purity_of(m)) - 1.0, 0.0);
  return clamp01(0.5 * (1.0 + std::sqrt(radicand)));
}

double commutative_objective(std::span<const double> r, std::span<const double> s, double p) {
  if (r.size() != s.size()) throw InvalidArgument("objective: r and s differ in length");
  double linear = 0.0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    linear += r[i] * s[i];
    norm2 += s[i] * s[i];
  }
  return linear + p * std::sqrt(std::max(0.0, 1.0 - norm2));
}

SimplexSolution exact_commutative_solver(std::span<const double> r_in, double p) {
  const int d = static_cast<int>(r_in.size());
  if (d < 1) throw InvalidArgument("solver needs at least one coordinate");
  if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("solver needs finite p >= 0");
  double total = 0.0;
  for (double v : r_in) {
    if (!std::isfinite(v) || v < -kSimplexInputTolerance) {
      throw InvalidArgument("solver weights must be non-negative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kSimplexInputTolerance) {
    throw InvalidArgument("solver weights sum to " + std::to_string(total) + ", expected 1");
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return r_in[a] > r_in[b]; });
  std::vector<double> r(d);
  for (int i = 0; i < d; ++i) r[i] = std::max(r_in[order[i]], 0.0);

  std::vector<double> s_sorted(d, 0.0);
  SimplexSolution out;
  int accepted = 0;
  if (p == 0.0 || d == 1) {
    // Linear objective: the vertex at the largest weight.
    s_sorted[0] = 1.0;
    out.lagrange_lambda = -r[0];
    out.beta = 0.0;
    accepted = 1;
  } else {
    for (int k = d; k >= 2; --k) {
      SupportCandidate c = solve_on_support(r, k, p);
      double s_last = (r[k - 1] + c.lambda) / c.beta;
      bool slack_ok = (k == d) || (r[k] + c.lambda <= kSlackTolerance);
      if (s_last > kSlackTolerance && slack_ok) {
        for (int i = 0; i < k; ++i) s_sorted[i] = (r[i] + c.lambda) / c.beta;
        out.lagrange_lambda = c.lambda;
        out.beta = c.beta;
        accepted = k;
        break;
      }
    }
    if (accepted == 0) {
      throw NumericalError("commutative solver found no support satisfying the KKT conditions");
    }
  }

  out.s = RVector::Zero(d);
  for (int i = 0; i < d; ++i) out.s(order[i]) = s_sorted[i];
  for (int i = 0; i < accepted; ++i) out.support.push_back(order[i]);
  std::sort(out.support.begin(), out.support.end());
  out.value = commutative_objective(r, s_sorted, p);
  return out;
}

BoundReport compute_bound_report(const EnsembleMoments& m) {
  const int d = m.dim();
  BoundReport report;
  if (m.pure_support) {
    PureOptimum opt = theorem1_pure_optimum(m);
    report.pure_optimum = opt.value;
    report.pure_estimator = opt.estimator;
  }
  report.fvg_bound = clamp01(theorem2_fvg_bound(m));

  AnalyticBound analytic = theorem3_analytic_bound(m, d);
  report.super_analytic_bound = analytic.bound;
  report.sigma_sharp = analytic.sigma_sharp;
  report.sigma_sharp_is_state = analytic.is_state;

  report.mean_spectrum = eigh(m.mean).eigenvalues;
  std::vector<double> spectrum(d);
  for (int i = 0; i < d; ++i) spectrum[i] = std::max(report.mean_spectrum(i), 0.0);
  report.exact_solution = exact_commutative_solver(spectrum, m.p_rho);
  report.super_exact_bound = clamp01(report.exact_solution.value);

  double mean_pur = mean_purity_of(m);
  report.mean_estimator_posterior_value =
      clamp01(mean_pur + m.p_rho * std::sqrt(std::max(0.0, 1.0 - mean_pur)));
  return report;
}

BoundReport compute_bound_report(const WeightedEnsemble& e) { return compute_bound_report(moments(e)); }

}  // namespace fidbench
