#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fidbench/qmat.hpp"
#include "fidbench/rng.hpp"

namespace fidbench {

enum class Prior { haar_pure, hilbert_schmidt, bures, arcsine };

std::string_view to_string(Prior prior);
std::optional<Prior> parse_prior(std::string_view name);

// Samplers. All require d >= 2 and throw InvalidArgument otherwise.

/// d x d matrix of i.i.d. standard complex Gaussians.
CMatrix sample_ginibre(int d, RngStream& rng);
/// Haar unitary via QR of a Ginibre matrix with the phases of diag(R) removed.
CMatrix sample_haar_unitary(int d, RngStream& rng);
/// Haar-random unit vector.
CVector sample_haar_vector(int d, RngStream& rng);

DensityMatrix sample_haar_pure(int d, RngStream& rng);
/// G G^dag / Tr(G G^dag).
DensityMatrix sample_hilbert_schmidt(int d, RngStream& rng);
/// (1+U) G G^dag (1+U^dag), trace-normalized.
DensityMatrix sample_bures(int d, RngStream& rng);
/// Haar eigenbasis with a symmetric Dirichlet(1/2) spectrum; at d = 2 the
/// eigenvalue marginal is the arcsine law 1/(pi sqrt(x(1-x))).
DensityMatrix sample_arcsine(int d, RngStream& rng);

DensityMatrix sample_prior(Prior prior, int d, RngStream& rng);

/// Particle approximation sum_j w_j delta(rho - rho_j). Immutable; copies share
/// the particle storage.
class WeightedEnsemble {
 public:
  static constexpr double kWeightSumTolerance = 1e-10;

  /// Weights must be non-negative and sum to one within kWeightSumTolerance.
  WeightedEnsemble(std::vector<DensityMatrix> particles, std::vector<double> weights);

  static WeightedEnsemble uniform(std::vector<DensityMatrix> particles);
  /// Divides by the sum of the given non-negative weights.
  static WeightedEnsemble normalized(std::vector<DensityMatrix> particles,
                                     std::vector<double> weights);

  /// Same particles, new weights (validated as in the constructor).
  WeightedEnsemble with_weights(std::vector<double> weights) const;

  std::size_t size() const { return particles_->size(); }
  int dim() const { return particles_->front().dim(); }
  const DensityMatrix& particle(std::size_t j) const { return (*particles_)[j]; }
  const std::vector<DensityMatrix>& particles() const { return *particles_; }
  const std::vector<double>& weights() const { return weights_; }

  /// sum_j w_j rho_j. The single code path for every posterior-mean use.
  CMatrix weighted_mean() const;

 private:
  WeightedEnsemble(std::shared_ptr<const std::vector<DensityMatrix>> particles,
                   std::vector<double> weights);

  std::shared_ptr<const std::vector<DensityMatrix>> particles_;
  std::vector<double> weights_;
};

/// Particles with purity at or above this are treated as pure.
inline constexpr double kPurePurityThreshold = 1.0 - 1e-10;

struct EnsembleMoments {
  HermitianMatrix mean;         // E[rho]
  HermitianMatrix mean_square;  // E[rho^2]
  double p_rho = 0.0;           // E[sqrt(1 - Tr rho^2)]
  double mean_purity = 0.0;     // E[Tr rho^2]
  bool pure_support = false;    // every weighted particle is pure

  int dim() const { return mean.dim(); }
};

EnsembleMoments moments(const WeightedEnsemble& e);

}  // namespace fidbench
