#include "fidbench/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fidbench/error.hpp"

namespace fidbench {

namespace {

void require_dim(int d) {
  if (d < 2) throw InvalidArgument("sampler dimension must be >= 2, got " + std::to_string(d));
}

DensityMatrix trace_normalized(const CMatrix& positive) {
  return DensityMatrix(CMatrix(positive / positive.trace().real()));
}

}  // namespace

std::string_view to_string(Prior prior) {
  switch (prior) {
    case Prior::haar_pure: return "haar_pure";
    case Prior::hilbert_schmidt: return "hilbert_schmidt";
    case Prior::bures: return "bures";
    case Prior::arcsine: return "arcsine";
  }
  return "unknown";
}

std::optional<Prior> parse_prior(std::string_view name) {
  for (Prior p : {Prior::haar_pure, Prior::hilbert_schmidt, Prior::bures, Prior::arcsine}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

CMatrix sample_ginibre(int d, RngStream& rng) {
  require_dim(d);
  CMatrix g(d, d);
  // Column-major fill order is part of the reproducibility contract.
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
  return g;
}

CMatrix sample_haar_unitary(int d, RngStream& rng) {
  CMatrix g = sample_ginibre(d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Complex rii = r(i, i);
    double mag = std::abs(rii);
    Complex phase = mag > 0.0 ? rii / mag : Complex(1.0, 0.0);
    q.col(i) *= phase;
  }
  return q;
}

CVector sample_haar_vector(int d, RngStream& rng) {
  require_dim(d);
  CVector g(d);
  for (int i = 0; i < d; ++i) g(i) = rng.complex_normal();
  return g / g.norm();
}

DensityMatrix sample_haar_pure(int d, RngStream& rng) {
  return DensityMatrix::pure(sample_haar_vector(d, rng));
}

DensityMatrix sample_hilbert_schmidt(int d, RngStream& rng) {
  CMatrix g = sample_ginibre(d, rng);
  return trace_normalized(g * g.adjoint());
}

DensityMatrix sample_bures(int d, RngStream& rng) {
  CMatrix u = sample_haar_unitary(d, rng);
  CMatrix g = sample_ginibre(d, rng);
  CMatrix a = (CMatrix::Identity(d, d) + u) * g;
  return trace_normalized(a * a.adjoint());
}

DensityMatrix sample_arcsine(int d, RngStream& rng) {
  CMatrix u = sample_haar_unitary(d, rng);
  RVector spectrum(d);
  double total = 0.0;
  do {
    for (int i = 0; i < d; ++i) spectrum(i) = rng.gamma(0.5);
    total = spectrum.sum();
  } while (!(total > 0.0));
  spectrum /= total;
  return DensityMatrix(CMatrix(u * spectrum.cast<Complex>().asDiagonal() * u.adjoint()));
}

DensityMatrix sample_prior(Prior prior, int d, RngStream& rng) {
  switch (prior) {
    case Prior::haar_pure: return sample_haar_pure(d, rng);
    case Prior::hilbert_schmidt: return sample_hilbert_schmidt(d, rng);
    case Prior::bures: return sample_bures(d, rng);
    case Prior::arcsine: return sample_arcsine(d, rng);
  }
  throw InvalidArgument("unknown prior");
}

WeightedEnsemble::WeightedEnsemble(std::vector<DensityMatrix> particles,
                                   std::vector<double> weights)
    : WeightedEnsemble(std::make_shared<const std::vector<DensityMatrix>>(std::move(particles)),
                       std::move(weights)) {}

WeightedEnsemble::WeightedEnsemble(std::shared_ptr<const std::vector<DensityMatrix>> particles,
                                   std::vector<double> weights)
    : particles_(std::move(particles)), weights_(std::move(weights)) {
  if (particles_->empty()) throw InvalidArgument("ensemble must contain at least one particle");
  if (particles_->size() != weights_.size()) {
    throw InvalidArgument("ensemble has " + std::to_string(particles_->size()) + " particles but " +
                          std::to_string(weights_.size()) + " weights");
  }
  int d = particles_->front().dim();
  for (const auto& p : *particles_) {
    if (p.dim() != d) throw InvalidArgument("ensemble particles differ in dimension");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("ensemble weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw InvalidArgument("ensemble weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

WeightedEnsemble WeightedEnsemble::uniform(std::vector<DensityMatrix> particles) {
  std::size_t n = particles.size();
  if (n == 0) throw InvalidArgument("ensemble must contain at least one particle");
  return WeightedEnsemble(std::move(particles), std::vector<double>(n, 1.0 / n));
}

WeightedEnsemble WeightedEnsemble::normalized(std::vector<DensityMatrix> particles,
                                              std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("ensemble weights must be >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw InvalidArgument("ensemble weights sum to zero");
  for (double& w : weights) w /= sum;
  return WeightedEnsemble(std::move(particles), std::move(weights));
}

WeightedEnsemble WeightedEnsemble::with_weights(std::vector<double> weights) const {
  return WeightedEnsemble(particles_, std::move(weights));
}

CMatrix WeightedEnsemble::weighted_mean() const {
  const int d = dim();
  CMatrix mean = CMatrix::Zero(d, d);
  for (std::size_t j = 0; j < size(); ++j) {
    if (weights_[j] != 0.0) mean += weights_[j] * (*particles_)[j].matrix();
  }
  return mean;
}

EnsembleMoments moments(const WeightedEnsemble& e) {
  const int d = e.dim();
  CMatrix mean_square = CMatrix::Zero(d, d);
  double p_rho = 0.0;
  double mean_purity = 0.0;
  bool pure_support = true;
  for (std::size_t j = 0; j < e.size(); ++j) {
    double w = e.weights()[j];
    if (w == 0.0) continue;
    const CMatrix& rho = e.particle(j).matrix();
    mean_square += w * (rho * rho);
    double pur = std::clamp(rho.squaredNorm(), 0.0, 1.0);
    mean_purity += w * pur;
    if (pur < kPurePurityThreshold) {
      pure_support = false;
      p_rho += w * std::sqrt(1.0 - pur);
    }
  }
  return EnsembleMoments{HermitianMatrix(e.weighted_mean()), HermitianMatrix(mean_square),
                         p_rho, mean_purity, pure_support};
}

}  // namespace fidbench
