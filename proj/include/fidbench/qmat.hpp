#pragma once

#include <complex>
#include <limits>

#include <Eigen/Dense>

namespace fidbench {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Dense complex Hermitian d x d matrix. The input is always symmetrized as
/// (A + A^dag)/2, so entries(i,j) == conj(entries(j,i)) exactly.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const CMatrix& a);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(const RVector& diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }

 private:
  CMatrix m_;
};

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
struct EigDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;
};

/// Hermitian eigendecomposition. Ties keep the order of the underlying solver
/// (stable descending sort of its ascending output).
EigDecomposition eigh(const HermitianMatrix& x);

/// Positive semidefinite, unit-trace Hermitian matrix.
class DensityMatrix {
 public:
  static constexpr double kTraceTolerance = 1e-10;
  static constexpr double kPsdTolerance = 1e-9;

  /// Symmetrizes and validates; throws InvalidArgument on trace or PSD violations.
  explicit DensityMatrix(const CMatrix& a);
  explicit DensityMatrix(const HermitianMatrix& h);

  static DensityMatrix pure(const CVector& psi);
  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix diagonal(const RVector& probabilities);

  int dim() const { return base_.dim(); }
  const HermitianMatrix& hermitian() const { return base_; }
  const CMatrix& matrix() const { return base_.matrix(); }

 private:
  HermitianMatrix base_;
};

/// Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2, clamped to [0,1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Tr(rho sigma) + sqrt(1 - Tr rho^2) sqrt(1 - Tr sigma^2), clamped to [0,1].
double super_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Tr(rho^2), clamped to [1/d, 1].
double purity(const DensityMatrix& rho);

/// Tr(A B) for Hermitian A, B (real part; the imaginary part vanishes).
double trace_product(const CMatrix& a, const CMatrix& b);

inline constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

/// Schatten p-norm from the eigenvalues; p = kInfinityNorm gives the operator norm.
double schatten_norm(const HermitianMatrix& x, double p);

/// Principal square root of a PSD matrix. Eigenvalues in [-1e-9, 0) and those
/// below the rounding floor are set to zero; anything below -1e-9 throws.
CMatrix sqrt_psd(const HermitianMatrix& x);

}  // namespace fidbench
