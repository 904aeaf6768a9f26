#include "fidbench/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "fidbench/error.hpp"

namespace fidbench {

namespace {

// Eigenvalues this close to zero (relative to the spectral scale) are
// indistinguishable from rounding noise of the decomposition.
double rounding_floor(int dim, double scale) {
  return 16.0 * dim * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
}

void require_finite(const CMatrix& a) {
  if (!a.allFinite()) throw InvalidArgument("matrix has non-finite entries");
}

void require_same_dim(int a, int b) {
  if (a != b) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

// Square roots of a PSD spectrum: values in [-1e-9, floor] map to zero.
RVector clamped_sqrt(const RVector& eigenvalues, double floor) {
  RVector out(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    double v = eigenvalues(i);
    if (v < -DensityMatrix::kPsdTolerance) {
      throw InvalidArgument("matrix is not positive semidefinite (eigenvalue " + std::to_string(v) +
                            ")");
    }
    out(i) = v <= floor ? 0.0 : std::sqrt(v);
  }
  return out;
}

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InvalidArgument("Hermitian matrix must be square and non-empty");
  }
  require_finite(a);
  m_ = (a + a.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::zero(int dim) { return HermitianMatrix(CMatrix::Zero(dim, dim)); }

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(CMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& diag) {
  return HermitianMatrix(CMatrix(diag.cast<Complex>().asDiagonal()));
}

EigDecomposition eigh(const HermitianMatrix& x) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(x.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigendecomposition did not converge");
  }
  const RVector& ascending = solver.eigenvalues();
  const int d = x.dim();

  // Stable descending sort: equal eigenvalues keep the solver's order.
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ascending(a) > ascending(b); });

  EigDecomposition out{RVector(d), CMatrix(d, d)};
  for (int i = 0; i < d; ++i) {
    out.eigenvalues(i) = ascending(order[i]);
    out.eigenvectors.col(i) = solver.eigenvectors().col(order[i]);
  }
  return out;
}

DensityMatrix::DensityMatrix(const CMatrix& a) : DensityMatrix(HermitianMatrix(a)) {}

DensityMatrix::DensityMatrix(const HermitianMatrix& h) : base_(h) {
  double tr = base_.trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    throw InvalidArgument("density matrix trace is " + std::to_string(tr) + ", expected 1");
  }
  double min_eig = eigh(base_).eigenvalues(dim() - 1);
  if (min_eig < -kPsdTolerance) {
    throw InvalidArgument("density matrix has negative eigenvalue " + std::to_string(min_eig));
  }
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  double norm = psi.norm();
  if (psi.size() == 0 || !(norm > 0.0)) throw InvalidArgument("pure state vector must be non-zero");
  CVector unit = psi / norm;
  return DensityMatrix(CMatrix(unit * unit.adjoint()));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  return DensityMatrix(CMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim)));
}

DensityMatrix DensityMatrix::diagonal(const RVector& probabilities) {
  return DensityMatrix(HermitianMatrix::diagonal(probabilities));
}

CMatrix sqrt_psd(const HermitianMatrix& x) {
  EigDecomposition e = eigh(x);
  double scale = e.eigenvalues.cwiseAbs().maxCoeff();
  RVector roots = clamped_sqrt(e.eigenvalues, rounding_floor(x.dim(), scale));
  return e.eigenvectors * roots.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho.dim(), sigma.dim());
  const int d = rho.dim();
  EigDecomposition er = eigh(rho.hermitian());
  EigDecomposition es = eigh(sigma.hermitian());
  RVector roots_r = clamped_sqrt(er.eigenvalues, rounding_floor(d, er.eigenvalues.cwiseAbs().maxCoeff()));
  RVector roots_s = clamped_sqrt(es.eigenvalues, rounding_floor(d, es.eigenvalues.cwiseAbs().maxCoeff()));

  // The argument of lower numerical rank (then higher purity) goes under the
  // square root. The inner matrix is then generically of full rank on that
  // support, so its spectrum carries no rounding-level eigenvalues whose roots
  // would show up at 1e-8, and swapping the arguments changes nothing.
  auto rank = [](const RVector& roots) { return (roots.array() > 0.0).count(); };
  auto kr = rank(roots_r), ks = rank(roots_s);
  bool swap = ks < kr || (ks == kr && sigma.matrix().squaredNorm() > rho.matrix().squaredNorm());
  const EigDecomposition& outer = swap ? es : er;
  const RVector& roots = swap ? roots_s : roots_r;
  const DensityMatrix& middle = swap ? rho : sigma;

  // sqrt(outer) middle sqrt(outer) in the eigenbasis of outer. The graded
  // form D^1/2 S D^1/2 keeps small eigenvalues accurate to high relative
  // precision, so the inner spectrum only has negatives clamped.
  CMatrix rotated = outer.eigenvectors.adjoint() * middle.matrix() * outer.eigenvectors;
  CVector croots = roots.cast<Complex>();
  HermitianMatrix inner(CMatrix(croots.asDiagonal() * rotated * croots.asDiagonal()));
  double trace_root = clamped_sqrt(eigh(inner).eigenvalues, 0.0).sum();
  return std::clamp(trace_root * trace_root, 0.0, 1.0);
}

double trace_product(const CMatrix& a, const CMatrix& b) {
  // Tr(AB) = sum_ij A_ij B_ji; for Hermitian B, B_ji = conj(B_ij).
  return (a.array() * b.conjugate().array()).sum().real();
}

double purity(const DensityMatrix& rho) {
  double inv_d = 1.0 / rho.dim();
  double p = rho.matrix().squaredNorm();
  p = std::clamp(p, inv_d - 1e-12, 1.0 + 1e-12);
  return std::clamp(p, inv_d, 1.0);
}

double super_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho.dim(), sigma.dim());
  double overlap = trace_product(rho.matrix(), sigma.matrix());
  // 1 - Tr(rho^2) is twice the small eigenvalues of a nearly pure state, so it
  // gets the same rounding floor as the spectra in sqrt_psd.
  double floor = 2.0 * rounding_floor(rho.dim(), 1.0);
  auto mixedness = [floor](const DensityMatrix& x) {
    double g = 1.0 - std::min(x.matrix().squaredNorm(), 1.0);
    return g <= floor ? 0.0 : g;
  };
  return std::clamp(overlap + std::sqrt(mixedness(rho)) * std::sqrt(mixedness(sigma)), 0.0, 1.0);
}

double schatten_norm(const HermitianMatrix& x, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("Schatten norm requires p >= 1");
  RVector abs_eigs = eigh(x).eigenvalues.cwiseAbs();
  if (std::isinf(p)) return abs_eigs.maxCoeff();
  if (p == 1.0) return abs_eigs.sum();
  if (p == 2.0) return abs_eigs.norm();
  return std::pow(abs_eigs.array().pow(p).sum(), 1.0 / p);
}

}  // namespace fidbench
