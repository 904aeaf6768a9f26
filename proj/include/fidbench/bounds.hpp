#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fidbench/ensembles.hpp"
#include "fidbench/qmat.hpp"

namespace fidbench {

/// Maximizer of the pure-support problem max_sigma Tr(E[rho] sigma).
struct PureOptimum {
  double value;             // ||E[rho]||_inf
  DensityMatrix estimator;  // projector on the top eigenvector of E[rho]
};

/// Exact optimum for ensembles supported on pure states. Throws InvalidArgument
/// when the moments have mixed support (p_rho > 0).
PureOptimum theorem1_pure_optimum(const EnsembleMoments& m);

/// Fuchs-van de Graaf bound 1 - Tr(E[rho^2] - E[rho]^2)/4, clamped to <= 1.
double theorem2_fvg_bound(const EnsembleMoments& m);

struct AnalyticBound {
  double bound;
  HermitianMatrix sigma_sharp;  // unit trace, commutes with E[rho]; PSD only sometimes
  bool is_state;                // min eigenvalue of sigma_sharp >= -1e-10
};

/// Closed-form optimum of the super-fidelity program relaxed to the unit ball:
///   (1/d) (1 + sqrt(d-1) sqrt(d (p^2 + Tr rhohat^2) - 1)).
/// When d (p^2 + Tr rhohat^2) == 1 the optimizer degenerates and sigma_sharp = 1/d.
AnalyticBound theorem3_analytic_bound(const EnsembleMoments& m, int d);

/// Single-qubit maximum average fidelity (1 + sqrt(2 (p^2 + Tr rhohat^2) - 1)) / 2.
double bagan_qubit_bound(const EnsembleMoments& m);

struct SimplexSolution {
  RVector s;                 // optimizer, same index order as the input r
  double value = 0.0;
  std::vector<int> support;  // indices (input order, ascending) with s_i > 0
  double lagrange_lambda = 0.0;
  double beta = 0.0;         // p / sqrt(1 - |s|^2); zero on the p == 0 vertex
};

/// sum_i r_i s_i + p sqrt(1 - sum_i s_i^2), with the radicand clamped at 0.
double commutative_objective(std::span<const double> r, std::span<const double> s, double p);

/// Global maximum of commutative_objective over the probability simplex.
/// r must be non-negative (within 1e-9) and sum to one (within 1e-9); any
/// order is accepted and the solution is reported in the input order.
SimplexSolution exact_commutative_solver(std::span<const double> r, double p);

struct BoundReport {
  std::optional<double> pure_optimum;
  std::optional<DensityMatrix> pure_estimator;
  double fvg_bound = 1.0;
  double super_analytic_bound = 1.0;
  double super_exact_bound = 1.0;
  HermitianMatrix sigma_sharp = HermitianMatrix::zero(1);
  bool sigma_sharp_is_state = false;
  /// Super-fidelity objective at sigma = E[rho]: Tr rhohat^2 + p sqrt(1 - Tr rhohat^2).
  double mean_estimator_posterior_value = 0.0;
  RVector mean_spectrum;           // descending eigenvalues of E[rho]
  SimplexSolution exact_solution;  // indexed like mean_spectrum
};

BoundReport compute_bound_report(const EnsembleMoments& m);
BoundReport compute_bound_report(const WeightedEnsemble& e);

}  // namespace fidbench
