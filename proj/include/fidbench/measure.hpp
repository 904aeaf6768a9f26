#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "fidbench/qmat.hpp"
#include "fidbench/rng.hpp"

namespace fidbench {

enum class MeasurementKind { covariant_rank1, haar_basis };

std::string_view to_string(MeasurementKind kind);
std::optional<MeasurementKind> parse_measurement(std::string_view name);

/// One simulated single-shot outcome.
class MeasurementRecord {
 public:
  /// Outcome |psi><psi| of the uniform POVM; psi must have unit norm within 1e-10.
  static MeasurementRecord covariant(CVector direction);
  /// Outcome `outcome` of a projective measurement in the columns of `basis`.
  static MeasurementRecord in_basis(CMatrix basis, int outcome);

  MeasurementKind kind() const;
  int dim() const;

  /// Valid for covariant_rank1 records.
  const CVector& direction() const;
  /// Valid for haar_basis records.
  const CMatrix& basis() const;
  int outcome_index() const;

  /// The rank-one effect vector whose quadratic form is the likelihood.
  const CVector& effect_vector() const;

 private:
  struct Covariant {
    CVector direction;
  };
  struct Basis {
    CMatrix basis;
    int outcome;
    CVector column;
  };
  explicit MeasurementRecord(std::variant<Covariant, Basis> payload)
      : payload_(std::move(payload)) {}

  std::variant<Covariant, Basis> payload_;
};

/// Exact draw from the uniform-POVM outcome density d <psi|rho|psi> (relative
/// to Haar): eigen-index i ~ lambda_i, weights |<v_k|psi>|^2 ~ Dirichlet with
/// concentration 2 on i and 1 elsewhere, uniform phases.
MeasurementRecord simulate_covariant_shot(const DensityMatrix& true_state, RngStream& rng);

/// Haar-random orthonormal basis, outcome k with probability <b_k|rho|b_k>.
MeasurementRecord simulate_basis_shot(const DensityMatrix& true_state, RngStream& rng);

/// Same as simulate_basis_shot for a caller-supplied basis (no Haar draw).
MeasurementRecord simulate_shot_in_basis(const DensityMatrix& true_state, const CMatrix& basis,
                                         RngStream& rng);

MeasurementRecord simulate_shot(MeasurementKind kind, const DensityMatrix& true_state,
                                RngStream& rng);

/// Pr(record | particle) up to the constant POVM density d, clamped to >= 0.
double likelihood(const MeasurementRecord& record, const DensityMatrix& particle);

}  // namespace fidbench
