#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fidbench/error.hpp"
#include "fidbench/qmat.hpp"
#include "test_support.hpp"

namespace fidbench {
namespace {

using testing::random_state;

CMatrix pauli_x() {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

DensityMatrix ket0() { return DensityMatrix::diagonal(RVector::Unit(2, 0)); }
DensityMatrix ket1() { return DensityMatrix::diagonal(RVector::Unit(2, 1)); }

// Closed form for qubits: F = Tr(rho sigma) + 2 sqrt(det rho det sigma).
// Determinants at rounding level are zero: sqrt would turn 1e-17 into 3e-9.
double qubit_det(const DensityMatrix& rho) {
  double det = rho.matrix().determinant().real();
  return det <= 64 * std::numeric_limits<double>::epsilon() ? 0.0 : det;
}

double qubit_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  double overlap = (rho.matrix() * sigma.matrix()).trace().real();
  return overlap + 2.0 * std::sqrt(qubit_det(rho) * qubit_det(sigma));
}

TEST(HermitianMatrix, SymmetrizesInput) {
  CMatrix a(2, 2);
  a << Complex(1, 0), Complex(0.3, 0.1), Complex(0.2, 0.0), Complex(2, 0.5);
  HermitianMatrix h(a);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
  EXPECT_DOUBLE_EQ(h(0, 1).real(), 0.25);
  EXPECT_DOUBLE_EQ(h(1, 1).imag(), 0.0);
  EXPECT_THROW(HermitianMatrix(CMatrix(2, 3)), InvalidArgument);
}

TEST(DensityMatrix, RejectsInvalidStates) {
  EXPECT_THROW(DensityMatrix::diagonal(RVector::Constant(2, 0.6)), InvalidArgument);
  RVector neg(2);
  neg << 1.1, -0.1;
  EXPECT_THROW(DensityMatrix::diagonal(neg), InvalidArgument);
  RVector tiny(2);
  tiny << 1.0 + 5e-10, -5e-10;  // within the PSD floor, but trace still exact
  EXPECT_NO_THROW(DensityMatrix::diagonal(tiny));
}

TEST(Eigh, DescendingOrder) {
  RVector d(3);
  d << 1, 2, 3;
  EigDecomposition e = eigh(HermitianMatrix::diagonal(d));
  EXPECT_DOUBLE_EQ(e.eigenvalues(0), 3);
  EXPECT_DOUBLE_EQ(e.eigenvalues(1), 2);
  EXPECT_DOUBLE_EQ(e.eigenvalues(2), 1);
}

TEST(Eigh, QubitClosedForm) {
  CMatrix a = CMatrix::Identity(2, 2) / 2.0 + 0.3 * pauli_x();
  EigDecomposition e = eigh(HermitianMatrix(a));
  EXPECT_NEAR(e.eigenvalues(0), 0.8, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 0.2, 1e-14);
}

TEST(Eigh, ReconstructsAndOrthonormal) {
  RngStream rng(7, 0);
  for (int d : {2, 3, 5, 8}) {
    for (int rep = 0; rep < 50; ++rep) {
      CMatrix g = sample_ginibre(d, rng);
      HermitianMatrix a(g + g.adjoint());
      EigDecomposition e = eigh(a);
      CMatrix v = e.eigenvectors;
      CMatrix back = v * e.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint();
      EXPECT_LE(schatten_norm(HermitianMatrix(back - a.matrix()), 2.0), 1e-9 * d);
      EXPECT_LE((v.adjoint() * v - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-10);
      for (int i = 1; i < d; ++i) EXPECT_GE(e.eigenvalues(i - 1), e.eigenvalues(i));
    }
  }
}

TEST(Eigh, DeterministicForFixedInput) {
  RngStream rng(3, 1);
  HermitianMatrix a(sample_hilbert_schmidt(4, rng).matrix());
  EigDecomposition e1 = eigh(a);
  EigDecomposition e2 = eigh(a);
  EXPECT_EQ(e1.eigenvalues, e2.eigenvalues);
  EXPECT_EQ(e1.eigenvectors, e2.eigenvectors);
}

TEST(Fidelity, BasicValues) {
  RngStream rng(11, 0);
  DensityMatrix rho = sample_hilbert_schmidt(3, rng);
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(ket0(), ket1()), 0.0, 1e-15);
  EXPECT_NEAR(fidelity(ket0(), DensityMatrix::maximally_mixed(2)), 0.5, 1e-14);
}

TEST(Fidelity, MatchesQubitClosedForm) {
  RngStream rng(12, 0);
  for (int rep = 0; rep < 2000; ++rep) {
    DensityMatrix rho = random_state(2, rng);
    DensityMatrix sigma = random_state(2, rng);
    EXPECT_NEAR(fidelity(rho, sigma), qubit_fidelity(rho, sigma), 1e-9);
  }
}

TEST(Fidelity, DimensionMismatchThrows) {
  EXPECT_THROW(fidelity(ket0(), DensityMatrix::maximally_mixed(3)), InvalidArgument);
  EXPECT_THROW(super_fidelity(ket0(), DensityMatrix::maximally_mixed(3)), InvalidArgument);
}

TEST(SqrtPsd, RejectsNegativeSpectrum) {
  RVector d(2);
  d << 1.0, -1e-6;
  EXPECT_THROW(sqrt_psd(HermitianMatrix::diagonal(d)), InvalidArgument);
  d << 1.0, -5e-10;
  CMatrix root = sqrt_psd(HermitianMatrix::diagonal(d));
  EXPECT_EQ(root(1, 1), Complex(0.0, 0.0));
}

TEST(SuperFidelity, Values) {
  RngStream rng(13, 0);
  DensityMatrix pure = sample_haar_pure(3, rng);
  EXPECT_NEAR(super_fidelity(pure, pure), 1.0, 1e-12);
  DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  EXPECT_NEAR(super_fidelity(mixed, mixed), 1.0, 1e-15);
}

TEST(Purity, Values) {
  EXPECT_DOUBLE_EQ(purity(DensityMatrix::maximally_mixed(4)), 0.25);
  RngStream rng(14, 0);
  EXPECT_NEAR(purity(sample_haar_pure(4, rng)), 1.0, 1e-12);
  RVector d(2);
  d << 0.75, 0.25;
  EXPECT_DOUBLE_EQ(purity(DensityMatrix::diagonal(d)), 0.625);
}

TEST(SchattenNorm, Values) {
  EXPECT_NEAR(schatten_norm(HermitianMatrix::identity(5), 1.0), 5.0, 1e-14);
  RVector d(2);
  d << 3, -4;
  HermitianMatrix x = HermitianMatrix::diagonal(d);
  EXPECT_NEAR(schatten_norm(x, kInfinityNorm), 4.0, 1e-14);
  EXPECT_NEAR(schatten_norm(x, 2.0), 5.0, 1e-14);
  EXPECT_NEAR(schatten_norm(x, 3.0), std::cbrt(27.0 + 64.0), 1e-13);
  EXPECT_THROW(schatten_norm(x, 0.5), InvalidArgument);
}

class FidelityProperties : public ::testing::TestWithParam<int> {};

TEST_P(FidelityProperties, FuchsVanDeGraafAndSuperFidelity) {
  const int d = GetParam();
  RngStream rng(100 + d, 0);
  for (int rep = 0; rep < 1000; ++rep) {
    DensityMatrix rho = random_state(d, rng);
    DensityMatrix sigma = random_state(d, rng);
    double f = fidelity(rho, sigma);
    double half_trace = 0.5 * schatten_norm(HermitianMatrix(rho.matrix() - sigma.matrix()), 1.0);
    EXPECT_LE(1.0 - std::sqrt(f), half_trace + 1e-8);
    EXPECT_LE(half_trace, std::sqrt(1.0 - f) + 1e-8);
    EXPECT_LE(f, super_fidelity(rho, sigma) + 1e-9);
    EXPECT_NEAR(f, fidelity(sigma, rho), 1e-9);
    if (d == 2) EXPECT_NEAR(f, super_fidelity(rho, sigma), 1e-9);
  }
}

TEST_P(FidelityProperties, PureArgumentReducesToOverlap) {
  const int d = GetParam();
  RngStream rng(200 + d, 0);
  for (int rep = 0; rep < 500; ++rep) {
    DensityMatrix psi = sample_haar_pure(d, rng);
    DensityMatrix sigma = random_state(d, rng);
    double overlap = (psi.matrix() * sigma.matrix()).trace().real();
    EXPECT_NEAR(fidelity(psi, sigma), overlap, 1e-9);
    EXPECT_NEAR(fidelity(sigma, psi), overlap, 1e-9);
  }
}

TEST_P(FidelityProperties, UnitaryInvariance) {
  const int d = GetParam();
  RngStream rng(300 + d, 0);
  for (int rep = 0; rep < 300; ++rep) {
    DensityMatrix rho = random_state(d, rng);
    DensityMatrix sigma = random_state(d, rng);
    CMatrix u = sample_haar_unitary(d, rng);
    DensityMatrix rho_u(CMatrix(u * rho.matrix() * u.adjoint()));
    DensityMatrix sigma_u(CMatrix(u * sigma.matrix() * u.adjoint()));
    EXPECT_NEAR(fidelity(rho, sigma), fidelity(rho_u, sigma_u), 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Dimensions, FidelityProperties, ::testing::Values(2, 3, 4));

}  // namespace
}  // namespace fidbench
