#include "pcsdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcsdp {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

SymMat::SymMat(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw InvalidMatrix("matrix must be square and non-empty");
  }
  if (!all_finite(m_)) {
    throw InvalidMatrix("matrix has non-finite entries");
  }
  const double scale = 1.0 + m_.cwiseAbs().maxCoeff();
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw InvalidMatrix("matrix is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
  }
  // Make symmetry exact so downstream solvers never see drift.
  m_ = ((m_ + m_.transpose()) * 0.5).eval();
}

SymMat SymMat::symmetrized(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidMatrix("matrix must be square and non-empty");
  }
  if (!all_finite(m)) {
    throw InvalidMatrix("matrix has non-finite entries");
  }
  Matrix s = (m + m.transpose()) * 0.5;
  SymMat out;
  out.m_ = std::move(s);
  return out;
}

SpectralDecomp eig_sym(const SymMat& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.mat());
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("symmetric eigendecomposition did not converge");
  }
  return SpectralDecomp{solver.eigenvalues(), solver.eigenvectors()};
}

LdlFactors ldl(const SymMat& m) {
  const int n = m.dim();
  const Matrix& a = m.mat();
  const double scale = std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  const double zero_tol = 1e-10 * scale;
  const double neg_tol = 1e-6 * std::max(scale, 1.0);

  Matrix l = Matrix::Identity(n, n);
  Vector d = Vector::Zero(n);
  std::vector<bool> mask(n, false);

  for (int j = 0; j < n; ++j) {
    double dj = a(j, j);
    for (int k = 0; k < j; ++k) dj -= l(j, k) * l(j, k) * d[k];
    if (dj < -neg_tol) {
      throw NotPSD("negative pivot " + std::to_string(dj) + " at column " +
                   std::to_string(j));
    }
    if (dj <= zero_tol) {
      // Rank deficiency: record the zero and keep the unit column, which is
      // exact for PSD inputs (the whole residual column vanishes with the
      // pivot).
      d[j] = std::max(dj, 0.0);
      mask[j] = true;
      continue;
    }
    d[j] = dj;
    for (int i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k) * d[k];
      l(i, j) = v / dj;
    }
  }

  // Re-derive the mask against the contract threshold 1e-10 * max(D); it
  // can differ from the in-pass threshold only for pathological scalings.
  const double dmax = std::max(d.maxCoeff(), 1e-300);
  for (int j = 0; j < n; ++j) {
    if (std::abs(d[j]) <= 1e-10 * dmax) mask[j] = true;
  }
  return LdlFactors{std::move(l), std::move(d), std::move(mask)};
}

SymMat shifted_inverse(const SymMat& f, double theta, ShiftSide side) {
  const int n = f.dim();
  Matrix shifted;
  if (side == ShiftSide::FMinus) {
    shifted = f.mat() - theta * Matrix::Identity(n, n);
  } else {
    shifted = theta * Matrix::Identity(n, n) - f.mat();
  }
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw ShiftInSpectrum("shift " + std::to_string(theta) +
                          " is not strictly outside the spectrum");
  }
  Matrix inv = llt.solve(Matrix::Identity(n, n));
  return SymMat::symmetrized(std::move(inv));
}

SymMat matrix_power_int(const SymMat& m, int k) {
  if (k < 1) throw Error("matrix_power_int requires k >= 1");
  // Repeated squaring. All intermediates are polynomials in m, so products
  // commute and (P + P^T)/2 only scrubs floating-point asymmetry.
  auto resym = [](const Matrix& p) -> Matrix {
    return (p + p.transpose()) * 0.5;
  };
  Matrix result;
  Matrix base = m.mat();
  bool have_result = false;
  int e = k;
  while (e > 0) {
    if (e & 1) {
      result = have_result ? resym(result * base) : base;
      have_result = true;
    }
    e >>= 1;
    if (e > 0) base = resym(base * base);
  }
  return SymMat::symmetrized(std::move(result));
}

SymMat exp_base(const SymMat& m, double base) {
  if (!(base > 1.0)) throw Error("exp_base requires base > 1");
  SpectralDecomp decomp = eig_sym(m);
  const double log_base = std::log(base);
  const double max_exponent = decomp.max_eigenvalue() * log_base;
  if (max_exponent > std::log(std::numeric_limits<double>::max()) - 1.0) {
    throw Overflow("base^lambda_max overflows (exponent " +
                   std::to_string(max_exponent) + ")");
  }
  Vector powered = (decomp.eigenvalues.array() * log_base).exp();
  Matrix out =
      decomp.basis * powered.asDiagonal() * decomp.basis.transpose();
  return SymMat::symmetrized(std::move(out));
}

std::pair<double, Vector> lanczos_extreme(const SymMat& m, double gamma,
                                          std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error("lanczos_extreme requires gamma in (0,1)");
  }
  const int n = m.dim();
  if (m.is_zero(0.0)) {
    Vector e1 = Vector::Zero(n);
    e1[0] = 1.0;
    return {0.0, e1};
  }

  // Scale so the powered matrix stays in range: the infinity norm bounds
  // lambda_max from above and lambda_max >= norm/n keeps powers of the
  // scaled matrix above underflow at desk sizes.
  const double norm = m.mat().cwiseAbs().rowwise().sum().maxCoeff();
  Matrix scaled = m.mat() / norm;
  const int power = std::min(std::max(n, 2), 32);
  Matrix boosted = matrix_power_int(SymMat::symmetrized(scaled), power).mat();

  Rng rng(seed);
  Vector z = rng.normal_vector(n);
  z.normalize();

  const int cap = 10 * static_cast<int>(std::ceil(
                           std::log(static_cast<double>(std::max(n, 2))) /
                           std::sqrt(gamma)));
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < std::max(cap, 4); ++it) {
    Vector w = boosted * z;
    double wn = w.norm();
    if (wn < 1e-300) {
      // Start vector fell into the numerical null space; redraw.
      z = rng.normal_vector(n);
      z.normalize();
      prev = -std::numeric_limits<double>::infinity();
      continue;
    }
    z = w / wn;
    const double rayleigh = z.dot(m.mat() * z);
    if (std::abs(rayleigh - prev) <= 1e-13 * std::abs(rayleigh)) {
      return {rayleigh, z};
    }
    prev = rayleigh;
  }
  throw ConvergenceFailure("extreme-eigenvalue power iteration hit its cap");
}

std::pair<double, Vector> lanczos_extreme_or_eig(const SymMat& m, double gamma,
                                                 std::uint64_t seed,
                                                 bool* fell_back) {
  if (fell_back) *fell_back = false;
  try {
    return lanczos_extreme(m, gamma, seed);
  } catch (const ConvergenceFailure&) {
    if (fell_back) *fell_back = true;
    SpectralDecomp decomp = eig_sym(m);
    const int n = m.dim();
    Vector v = decomp.basis.col(n - 1);
    return {v.dot(m.mat() * v), v};
  }
}

}  // namespace pcsdp
