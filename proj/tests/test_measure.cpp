#include <cmath>

#include <gtest/gtest.h>

#include "fidbench/error.hpp"
#include "fidbench/measure.hpp"
#include "test_support.hpp"

namespace fidbench {
namespace {

using testing::chi2_two_sample_pvalue;
using testing::histogram;

double quadratic_form(const CVector& v, const CMatrix& a) {
  Complex acc = 0.0;
  for (int i = 0; i < v.size(); ++i)
    for (int j = 0; j < v.size(); ++j) acc += std::conj(v(i)) * a(i, j) * v(j);
  return acc.real();
}

double max_eigenvalue(const DensityMatrix& rho) { return eigh(rho.hermitian()).eigenvalues(0); }

TEST(MeasurementRecord, Validation) {
  EXPECT_THROW(MeasurementRecord::covariant(CVector::Ones(2)), InvalidArgument);
  EXPECT_THROW(MeasurementRecord::in_basis(CMatrix::Ones(2, 2), 0), InvalidArgument);
  EXPECT_THROW(MeasurementRecord::in_basis(CMatrix::Identity(2, 2), 2), InvalidArgument);
  EXPECT_THROW(MeasurementRecord::in_basis(CMatrix::Identity(2, 2), -1), InvalidArgument);
  MeasurementRecord r = MeasurementRecord::in_basis(CMatrix::Identity(3, 3), 1);
  EXPECT_EQ(r.kind(), MeasurementKind::haar_basis);
  EXPECT_EQ(r.dim(), 3);
  EXPECT_EQ(r.outcome_index(), 1);
  EXPECT_EQ(r.effect_vector(), CVector(CMatrix::Identity(3, 3).col(1)));
}

TEST(MeasurementKind, NamesRoundTrip) {
  for (auto k : {MeasurementKind::covariant_rank1, MeasurementKind::haar_basis})
    EXPECT_EQ(parse_measurement(to_string(k)), k);
  EXPECT_FALSE(parse_measurement("bogus").has_value());
}

TEST(CovariantShot, MaximallyMixedGivesHaarOutcomes) {
  RngStream rng(3, 0);
  const int d = 3;
  std::vector<double> overlaps;
  DensityMatrix rho = DensityMatrix::maximally_mixed(d);
  for (int i = 0; i < 20000; ++i) overlaps.push_back(std::norm(simulate_covariant_shot(rho, rng).direction()(0)));
  // |<e1|psi>|^2 for Haar psi has CDF 1 - (1-x)^(d-1).
  EXPECT_GT(testing::ks_pvalue(overlaps, [](double x) { return 1 - std::pow(1 - std::clamp(x, 0.0, 1.0), d - 1); }),
            0.01);
}

TEST(CovariantShot, PureQubitOverlapMoment) {
  RngStream rng(2, 0);
  DensityMatrix rho = DensityMatrix::diagonal(RVector::Unit(2, 0));
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    MeasurementRecord r = simulate_covariant_shot(rho, rng);
    EXPECT_NEAR(r.direction().norm(), 1.0, 1e-12);
    sum += std::norm(r.direction()(0));
  }
  EXPECT_NEAR(sum / n, 2.0 / 3.0, 0.01);
}

TEST(CovariantShot, MatchesRejectionOracle) {
  for (int d : {2, 3, 4}) {
    RngStream rng(100 * d, 0), oracle(100 * d, 1);
    DensityMatrix rho = sample_hilbert_schmidt(d, rng);
    double top = max_eigenvalue(rho);
    const int n = 100000;
    std::vector<double> direct, reference;
    for (int i = 0; i < n; ++i)
      direct.push_back(likelihood(simulate_covariant_shot(rho, rng), rho));
    while (static_cast<int>(reference.size()) < n) {
      CVector psi = sample_haar_vector(d, oracle);
      double q = quadratic_form(psi, rho.matrix());
      if (oracle.uniform() * top < q) reference.push_back(q);
    }
    EXPECT_GT(chi2_two_sample_pvalue(histogram(direct, 50, 0, top), histogram(reference, 50, 0, top)),
              0.01)
        << "d=" << d;
  }
}

TEST(CovariantShot, Reproducible) {
  RngStream setup(3, 0);
  DensityMatrix rho = sample_bures(4, setup);
  RngStream a(4, 1), b(4, 1);
  for (int i = 0; i < 50; ++i)
    EXPECT_EQ(simulate_covariant_shot(rho, a).direction(), simulate_covariant_shot(rho, b).direction());
}

TEST(BasisShot, MaximallyMixedGivesUniformOutcomes) {
  RngStream rng(5, 0);
  const int d = 4, n = 40000;
  std::vector<double> counts(d, 0.0);
  for (int i = 0; i < n; ++i) counts[simulate_basis_shot(DensityMatrix::maximally_mixed(d), rng).outcome_index()] += 1;
  EXPECT_GT(testing::chi2_gof_pvalue(counts, std::vector<double>(d, double(n) / d)), 0.01);
}

TEST(BasisShot, PureStateInComputationalBasis) {
  RngStream rng(6, 0);
  DensityMatrix rho = DensityMatrix::diagonal(RVector::Unit(2, 0));
  for (int i = 0; i < 1000; ++i)
    EXPECT_EQ(simulate_shot_in_basis(rho, CMatrix::Identity(2, 2), rng).outcome_index(), 0);
}

TEST(BasisShot, BornFrequenciesWithinThreeSigma) {
  RngStream rng(7, 0);
  const int d = 3, n = 100000;
  DensityMatrix rho = sample_hilbert_schmidt(d, rng);
  CMatrix basis = sample_haar_unitary(d, rng);
  std::vector<int> counts(d, 0);
  for (int i = 0; i < n; ++i) ++counts[simulate_shot_in_basis(rho, basis, rng).outcome_index()];
  for (int k = 0; k < d; ++k) {
    double prob = quadratic_form(basis.col(k), rho.matrix());
    EXPECT_LE(std::abs(counts[k] - n * prob), 3 * std::sqrt(n * prob * (1 - prob))) << "k=" << k;
  }
}

TEST(Likelihood, Examples) {
  RngStream rng(8, 0);
  for (int d : {2, 5}) {
    MeasurementRecord r = simulate_covariant_shot(sample_bures(d, rng), rng);
    EXPECT_NEAR(likelihood(r, DensityMatrix::maximally_mixed(d)), 1.0 / d, 1e-14);
    EXPECT_NEAR(likelihood(r, DensityMatrix::pure(r.direction())), 1.0, 1e-12);
  }
  EXPECT_THROW(likelihood(MeasurementRecord::covariant(CVector::Unit(2, 0)), DensityMatrix::maximally_mixed(3)),
               InvalidArgument);
}

TEST(Likelihood, MatchesQuadraticFormAndStaysInUnitInterval) {
  RngStream rng(9, 0);
  for (int i = 0; i < 5000; ++i) {
    int d = 2 + static_cast<int>(rng.index(7));
    DensityMatrix particle = testing::random_state(d, rng);
    DensityMatrix truth = testing::random_state(d, rng);
    MeasurementRecord r = simulate_shot(rng.index(2) ? MeasurementKind::covariant_rank1 : MeasurementKind::haar_basis,
                                        truth, rng);
    double l = likelihood(r, particle);
    EXPECT_NEAR(l, std::max(0.0, quadratic_form(r.effect_vector(), particle.matrix())), 1e-12);
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 1.0 + 1e-12);
  }
}

}  // namespace
}  // namespace fidbench
