#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pcsdp/errors.hpp"
#include "pcsdp/rng.hpp"

namespace pcsdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense real symmetric matrix. The wrapped storage is validated on
// construction: entries must be finite and symmetric to
// 1e-12 * (1 + max|entry|). All operations below return re-symmetrized
// results so drift cannot accumulate across long solver runs.
class SymMat {
 public:
  SymMat() = default;

  // Validates symmetry and finiteness; throws InvalidMatrix.
  explicit SymMat(Matrix m);

  // Accepts any finite square matrix and stores (M + M^T)/2.
  static SymMat symmetrized(Matrix m);

  // Identity and zero factories.
  static SymMat identity(int n) { return SymMat(Matrix::Identity(n, n)); }
  static SymMat zero(int n) { return SymMat(Matrix::Zero(n, n)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  double trace() const { return m_.trace(); }

  // Trace inner product Tr(A B).
  double dot(const SymMat& other) const {
    return m_.cwiseProduct(other.m_).sum();
  }

  bool is_zero(double tol = 0.0) const {
    return m_.cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Matrix m_;
};

// Eigendecomposition of a SymMat: ascending eigenvalues, orthonormal basis
// columns so that basis * diag(eigenvalues) * basis^T reconstructs the source.
struct SpectralDecomp {
  Vector eigenvalues;
  Matrix basis;

  double min_eigenvalue() const { return eigenvalues[0]; }
  double max_eigenvalue() const { return eigenvalues[eigenvalues.size() - 1]; }
};

// Unit lower-triangular LDL^T factors of a PSD matrix. zero_diag_mask marks
// the diagonal entries of D treated as exact zeros during the factorization
// (rank deficiencies of the input).
struct LdlFactors {
  Matrix L;
  Vector D;
  std::vector<bool> zero_diag_mask;
};

enum class ShiftSide { FMinus, MinusF };

// Dense symmetric eigendecomposition, eigenvalues ascending.
SpectralDecomp eig_sym(const SymMat& m);

// LDL^T factorization without pivoting. Requires PSD input (lambda_min >=
// -1e-8); a clearly negative pivot raises NotPSD. Pivots within
// 1e-10 * max(D) of zero are recorded in zero_diag_mask and their column of
// L is taken as the unit column.
LdlFactors ldl(const SymMat& m);

// (F - theta I)^{-1} for side FMinus (requires theta below the spectrum) or
// (theta I - F)^{-1} for side MinusF (theta above the spectrum). Raises
// ShiftInSpectrum when the shifted matrix is not positive definite.
SymMat shifted_inverse(const SymMat& f, double theta, ShiftSide side);

// M^k by repeated squaring, k >= 1.
SymMat matrix_power_int(const SymMat& m, int k);

// base^M = basis * diag(base^lambda_j) * basis^T for base > 1. Raises
// Overflow when base^{lambda_max} is not representable.
SymMat exp_base(const SymMat& m, double base);

// Randomized estimate of the largest eigenvalue of a PSD matrix: returns a
// unit vector v and value = v^T M v with value >= (1 - gamma) * lambda_max(M)
// with probability >= 0.99 over the seed. Implemented as power iteration on
// an integer power of M; raises ConvergenceFailure when the Rayleigh
// quotient has not stabilized within the iteration cap. A zero matrix
// returns (0, e_1).
std::pair<double, Vector> lanczos_extreme(const SymMat& m, double gamma,
                                          std::uint64_t seed);

// lanczos_extreme with deterministic eig_sym fallback on ConvergenceFailure.
// fell_back, when non-null, reports whether the fallback was taken.
std::pair<double, Vector> lanczos_extreme_or_eig(const SymMat& m, double gamma,
                                                 std::uint64_t seed,
                                                 bool* fell_back = nullptr);

}  // namespace pcsdp
