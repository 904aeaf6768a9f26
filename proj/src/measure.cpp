#include "fidbench/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fidbench/ensembles.hpp"
#include "fidbench/error.hpp"

namespace fidbench {

namespace {

constexpr double kUnitTolerance = 1e-10;

double quadratic_form(const CVector& v, const CMatrix& rho) {
  return v.dot(rho * v).real();
}

}  // namespace

std::string_view to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::covariant_rank1: return "covariant_rank1";
    case MeasurementKind::haar_basis: return "haar_basis";
  }
  return "unknown";
}

std::optional<MeasurementKind> parse_measurement(std::string_view name) {
  if (name == "covariant_rank1") return MeasurementKind::covariant_rank1;
  if (name == "haar_basis") return MeasurementKind::haar_basis;
  return std::nullopt;
}

MeasurementRecord MeasurementRecord::covariant(CVector direction) {
  if (direction.size() < 1 || !direction.allFinite()) {
    throw InvalidArgument("measurement direction must be a finite non-empty vector");
  }
  if (std::abs(direction.norm() - 1.0) > kUnitTolerance) {
    throw InvalidArgument("measurement direction must have unit norm");
  }
  return MeasurementRecord(Covariant{std::move(direction)});
}

MeasurementRecord MeasurementRecord::in_basis(CMatrix basis, int outcome) {
  const auto d = basis.rows();
  if (d < 1 || basis.cols() != d || !basis.allFinite()) {
    throw InvalidArgument("measurement basis must be a finite square matrix");
  }
  double residual = (basis.adjoint() * basis - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (residual > kUnitTolerance) throw InvalidArgument("measurement basis is not unitary");
  if (outcome < 0 || outcome >= d) {
    throw InvalidArgument("outcome index " + std::to_string(outcome) + " out of range");
  }
  CVector column = basis.col(outcome);
  return MeasurementRecord(Basis{std::move(basis), outcome, std::move(column)});
}

MeasurementKind MeasurementRecord::kind() const {
  return std::holds_alternative<Covariant>(payload_) ? MeasurementKind::covariant_rank1
                                                     : MeasurementKind::haar_basis;
}

int MeasurementRecord::dim() const { return static_cast<int>(effect_vector().size()); }

const CVector& MeasurementRecord::direction() const {
  if (auto* c = std::get_if<Covariant>(&payload_)) return c->direction;
  throw InvalidArgument("record is not a covariant_rank1 outcome");
}

const CMatrix& MeasurementRecord::basis() const {
  if (auto* b = std::get_if<Basis>(&payload_)) return b->basis;
  throw InvalidArgument("record is not a haar_basis outcome");
}

int MeasurementRecord::outcome_index() const {
  if (auto* b = std::get_if<Basis>(&payload_)) return b->outcome;
  throw InvalidArgument("record is not a haar_basis outcome");
}

const CVector& MeasurementRecord::effect_vector() const {
  if (auto* c = std::get_if<Covariant>(&payload_)) return c->direction;
  return std::get<Basis>(payload_).column;
}

MeasurementRecord simulate_covariant_shot(const DensityMatrix& true_state, RngStream& rng) {
  const int d = true_state.dim();
  EigDecomposition e = eigh(true_state.hermitian());
  std::vector<double> weights(d);
  for (int i = 0; i < d; ++i) weights[i] = std::max(e.eigenvalues(i), 0.0);
  std::size_t heavy = rng.categorical(weights);

  RVector q(d);
  for (int k = 0; k < d; ++k) q(k) = rng.gamma(k == static_cast<int>(heavy) ? 2.0 : 1.0);
  q /= q.sum();

  CVector coords(d);
  for (int k = 0; k < d; ++k) {
    double phase = 2.0 * std::numbers::pi * rng.uniform();
    coords(k) = std::sqrt(q(k)) * Complex(std::cos(phase), std::sin(phase));
  }
  CVector psi = e.eigenvectors * coords;
  psi /= psi.norm();
  return MeasurementRecord::covariant(std::move(psi));
}

MeasurementRecord simulate_shot_in_basis(const DensityMatrix& true_state, const CMatrix& basis,
                                         RngStream& rng) {
  const int d = true_state.dim();
  if (basis.rows() != d) throw InvalidArgument("basis dimension does not match state");
  std::vector<double> probs(d);
  for (int k = 0; k < d; ++k) {
    probs[k] = std::max(quadratic_form(basis.col(k), true_state.matrix()), 0.0);
  }
  int outcome = static_cast<int>(rng.categorical(probs));
  return MeasurementRecord::in_basis(basis, outcome);
}

MeasurementRecord simulate_basis_shot(const DensityMatrix& true_state, RngStream& rng) {
  CMatrix basis = sample_haar_unitary(true_state.dim(), rng);
  return simulate_shot_in_basis(true_state, basis, rng);
}

MeasurementRecord simulate_shot(MeasurementKind kind, const DensityMatrix& true_state,
                                RngStream& rng) {
  return kind == MeasurementKind::covariant_rank1 ? simulate_covariant_shot(true_state, rng)
                                                  : simulate_basis_shot(true_state, rng);
}

double likelihood(const MeasurementRecord& record, const DensityMatrix& particle) {
  if (record.dim() != particle.dim()) {
    throw InvalidArgument("record dimension " + std::to_string(record.dim()) +
                          " does not match particle dimension " + std::to_string(particle.dim()));
  }
  return std::max(quadratic_form(record.effect_vector(), particle.matrix()), 0.0);
}

}  // namespace fidbench
