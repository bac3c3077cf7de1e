#include "pcsdp/normalization.hpp"

#include <algorithm>
#include <cmath>

namespace pcsdp {

namespace {

// S A S^T with S = D^{-1/2} L^{-1}, computed by triangular solves.
SymMat congruence_forward(const Matrix& l, const Vector& d_inv_sqrt,
                          const SymMat& a) {
  Matrix w = l.triangularView<Eigen::Lower>().solve(a.mat());
  Matrix z = l.triangularView<Eigen::Lower>().solve(w.transpose());
  // z = L^{-1} A L^{-T}; scale both sides by D^{-1/2}.
  Matrix scaled = d_inv_sqrt.asDiagonal() * z * d_inv_sqrt.asDiagonal();
  return SymMat::symmetrized(std::move(scaled));
}

// L^{-T} D^{-1/2} X' D^{-1/2} L^{-1}: the inverse congruence.
SymMat congruence_backward(const Matrix& l, const Vector& d_inv_sqrt,
                           const SymMat& x_prime) {
  Matrix mid = d_inv_sqrt.asDiagonal() * x_prime.mat() *
               d_inv_sqrt.asDiagonal();
  Matrix z = l.transpose().triangularView<Eigen::Upper>().solve(mid);
  Matrix x = l.transpose().triangularView<Eigen::Upper>().solve(z.transpose());
  return SymMat::symmetrized(std::move(x));
}

SymMat base_constraint(const PackCoverInstance& instance, int i) {
  const ConstraintFamily& f = instance.constraints;
  return f.is_robust() ? f.robust[i].nominal : f.explicit_matrices[i];
}

double worst_case_trace_dot(const PackCoverInstance& instance, int i) {
  const ConstraintFamily& f = instance.constraints;
  const SymMat identity = SymMat::identity(instance.dim());
  if (!f.is_robust()) return f.explicit_matrices[i].dot(identity);
  return robust_worst_case(f.robust[i], identity).second;
}

}  // namespace

bool TransformRecord::is_identity() const {
  if (delta != 0.0 || shift != 0.0 || !drop_witnesses.empty()) return false;
  if (L.size() == 0) return true;
  if (!L.isIdentity(0.0)) return false;
  return (D_delta.array() == 1.0).all();
}

NormalizedInstance normalize_type1(const PackCoverInstance& instance,
                                   double eps) {
  if (instance.variant != Variant::TypeI) {
    throw ValidationError("normalize_type1 requires a type1 instance");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ValidationError("normalize_type1 requires eps in (0,1)");
  }
  const int n = instance.dim();
  const int m = instance.family_size();

  // Discover the positive-definite prefix of the constraint sum.
  Matrix prefix = Matrix::Zero(n, n);
  int r = 0;
  double abar_min_eig = 0.0;
  for (int k = 0; k < m; ++k) {
    prefix += base_constraint(instance, k).mat();
    SpectralDecomp d = eig_sym(SymMat::symmetrized(prefix));
    if (d.min_eigenvalue() > 1e-10) {
      r = k + 1;
      abar_min_eig = d.min_eigenvalue();
      break;
    }
  }
  if (r == 0) {
    throw AssumptionB1Violated(
        "no prefix of the constraint list has a positive definite sum");
  }

  NormalizedInstance out;
  out.variant = Variant::TypeI;
  out.dim = n;
  for (int i = 0; i < r; ++i) out.initial_support.push_back(i);

  LdlFactors factors = ldl(instance.C);
  bool singular = std::any_of(factors.zero_diag_mask.begin(),
                              factors.zero_diag_mask.end(),
                              [](bool b) { return b; });

  double delta = 0.0;
  if (singular) {
    double max_dot = 0.0;
    for (int i = 0; i < m; ++i) {
      max_dot = std::max(max_dot, worst_case_trace_dot(instance, i));
    }
    const double zeta = instance.C.trace() / max_dot;
    const double trace_bound = static_cast<double>(r) / abar_min_eig;
    const double l_dot_lt = factors.L.squaredNorm();
    delta = eps * zeta / (trace_bound * l_dot_lt);
    if (delta < 1e-300) {
      delta = 1e-300;
      out.warnings.push_back(
          "perturbation magnitude underflowed; clamped to 1e-300");
    }
  }

  Vector d_delta = factors.D;
  for (int j = 0; j < n; ++j) {
    if (factors.zero_diag_mask[j]) d_delta[j] += delta;
  }
  Vector d_inv_sqrt = d_delta.array().rsqrt();

  const ConstraintFamily& f = instance.constraints;
  if (!f.is_robust()) {
    for (const SymMat& a : f.explicit_matrices) {
      out.family.explicit_matrices.push_back(
          congruence_forward(factors.L, d_inv_sqrt, a));
    }
  } else {
    for (const UncertainConstraint& uc : f.robust) {
      UncertainConstraint t;
      t.nominal = congruence_forward(factors.L, d_inv_sqrt, uc.nominal);
      for (const SymMat& p : uc.perturbations) {
        t.perturbations.push_back(congruence_forward(factors.L, d_inv_sqrt, p));
      }
      t.set = uc.set;
      out.family.robust.push_back(std::move(t));
    }
  }

  out.record.kind = Variant::TypeI;
  out.record.L = factors.L;
  out.record.D_delta = d_delta;
  out.record.delta = singular ? delta : 0.0;
  for (int i = 0; i < m; ++i) out.record.kept_constraints.push_back(i);
  out.record.eps = eps;
  out.record.scale_b = instance.original_b;

  // The congruence preserves positive definiteness of the support sum.
  Matrix support_sum = Matrix::Zero(n, n);
  for (int i : out.initial_support) {
    support_sum += out.family.is_robust()
                       ? out.family.robust[i].nominal.mat()
                       : out.family.explicit_matrices[i].mat();
  }
  if (eig_sym(SymMat::symmetrized(support_sum)).min_eigenvalue() <= 1e-12) {
    throw NumericalFailure(
        "support sum lost positive definiteness under the congruence");
  }
  return out;
}

std::pair<SymMat, std::map<int, double>> pull_back_type1(
    const TransformRecord& record, const SymMat& x_prime,
    const std::map<int, double>& y_prime) {
  Vector d_inv_sqrt = record.D_delta.array().rsqrt();
  SymMat x = congruence_backward(record.L, d_inv_sqrt, x_prime);
  return {std::move(x), y_prime};
}

SupportCheck check_support(const SymMat& c, const SymMat& a) {
  SpectralDecomp decomp = eig_sym(c);
  const double lam_max = std::max(decomp.max_eigenvalue(), 0.0);
  const double cutoff = 1e-10 * std::max(lam_max, 1e-300);
  const double a_norm = a.mat().norm();
  for (int j = 0; j < c.dim(); ++j) {
    if (decomp.eigenvalues[j] > cutoff) continue;
    Vector u = decomp.basis.col(j);
    if ((a.mat() * u).norm() > 1e-6 * a_norm) {
      return SupportWitness{u};
    }
  }
  return SupportContained{};
}

NormalizedInstance normalize_type2(const PackCoverInstance& instance,
                                   double eps, std::uint64_t seed) {
  if (instance.variant != Variant::TypeII) {
    throw ValidationError("normalize_type2 requires a type2 instance");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ValidationError("normalize_type2 requires eps in (0,1)");
  }
  if (instance.constraints.is_robust()) {
    throw ValidationError(
        "robust type2 families are solved in original form; "
        "normalize_type2 handles explicit families only");
  }
  const int n = instance.dim();
  const int m = instance.family_size();
  const std::vector<SymMat>& a = instance.constraints.explicit_matrices;

  NormalizedInstance out;
  out.variant = Variant::TypeII;
  out.record.kind = Variant::TypeII;
  out.record.eps = eps;
  out.record.scale_b = instance.original_b;

  // Range-support filter.
  std::vector<int> supported;
  for (int i = 0; i < m; ++i) {
    SupportCheck check = check_support(instance.C, a[i]);
    if (auto* witness = std::get_if<SupportWitness>(&check)) {
      DropWitness drop;
      drop.index = i;
      drop.x = witness->x;
      drop.quad = witness->x.dot(a[i].mat() * witness->x);
      out.record.drop_witnesses.push_back(std::move(drop));
    } else {
      supported.push_back(i);
    }
  }
  if (supported.empty()) {
    throw EmptyAfterSupportFilter("all constraints failed the range test");
  }

  // Reduce to the rank of C through the positive part of its LDL factors.
  LdlFactors factors = ldl(instance.C);
  std::vector<int> positive;
  for (int j = 0; j < n; ++j) {
    if (!factors.zero_diag_mask[j]) positive.push_back(j);
  }
  if (positive.empty()) {
    throw ValidationError("objective matrix C is zero");
  }
  const int n_prime = static_cast<int>(positive.size());

  // Columns of L^{-T} at the positive pivots.
  Matrix w_full = factors.L.transpose().triangularView<Eigen::Upper>().solve(
      Matrix::Identity(n, n));
  Matrix w_prime(n, n_prime);
  Vector d_prime(n_prime);
  for (int k = 0; k < n_prime; ++k) {
    w_prime.col(k) = w_full.col(positive[k]);
    d_prime[k] = factors.D[positive[k]];
  }
  Vector d_inv_sqrt = d_prime.array().rsqrt();

  std::vector<SymMat> reduced;
  for (int i : supported) {
    Matrix t = w_prime.transpose() * a[i].mat() * w_prime;
    Matrix scaled = d_inv_sqrt.asDiagonal() * t * d_inv_sqrt.asDiagonal();
    reduced.push_back(SymMat::symmetrized(std::move(scaled)));
  }

  // Half-approximate lambda_max per constraint, then trim and shift.
  std::vector<double> approx_max(reduced.size());
  for (std::size_t k = 0; k < reduced.size(); ++k) {
    approx_max[k] =
        lanczos_extreme_or_eig(reduced[k], 0.5, seed + k).first;
  }
  const double beta_prime =
      *std::min_element(approx_max.begin(), approx_max.end());
  if (!(beta_prime > 0.0)) {
    throw NumericalFailure("every surviving constraint has zero spectrum");
  }
  const double trim_cutoff = n_prime * beta_prime / eps;
  const double shift = eps * beta_prime / n_prime;

  for (std::size_t k = 0; k < reduced.size(); ++k) {
    if (approx_max[k] > trim_cutoff) continue;
    Matrix shifted =
        reduced[k].mat() + shift * Matrix::Identity(n_prime, n_prime);
    out.family.explicit_matrices.push_back(
        SymMat::symmetrized(std::move(shifted)));
    out.record.kept_constraints.push_back(supported[k]);
  }
  if (out.family.explicit_matrices.empty()) {
    throw NumericalFailure("trimming removed every constraint");
  }

  out.dim = n_prime;
  out.record.L = factors.L;
  out.record.D_delta = d_prime;
  out.record.positive_columns = positive;
  out.record.shift = shift;
  out.record.beta_prime = beta_prime;
  return out;
}

std::pair<SymMat, std::map<int, double>> pull_back_type2(
    const TransformRecord& record, const SymMat& x_prime,
    const std::map<int, double>& y_prime,
    const std::vector<DropWitness>& drop_witnesses) {
  const int n_prime = x_prime.dim();
  const int n = static_cast<int>(record.L.rows() > 0 ? record.L.rows()
                                                     : n_prime);

  double scale = 1.0;
  double sigma = 0.0;
  if (record.shift > 0.0) {
    double kappa =
        std::max(1.0, record.beta_prime * x_prime.trace() / n_prime);
    // The de-perturbation factor must stay positive.
    kappa = std::min(kappa, 0.99 / record.eps);
    scale = 1.0 / (1.0 - record.eps * kappa);
    sigma = record.eps * kappa / (record.beta_prime * n_prime);
  }

  Matrix in_norm = x_prime.mat() +
                   sigma * Matrix::Identity(n_prime, n_prime);

  Matrix x;
  if (record.L.size() == 0) {
    x = scale * in_norm;
  } else {
    Vector d_inv_sqrt = record.D_delta.array().rsqrt();
    Matrix mid = d_inv_sqrt.asDiagonal() * in_norm * d_inv_sqrt.asDiagonal();
    Matrix w_full = record.L.transpose()
                        .triangularView<Eigen::Upper>()
                        .solve(Matrix::Identity(n, n));
    Matrix w_prime(n, n_prime);
    for (int k = 0; k < n_prime; ++k) {
      w_prime.col(k) = w_full.col(record.positive_columns[k]);
    }
    x = scale * (w_prime * mid * w_prime.transpose());
  }

  for (const DropWitness& drop : drop_witnesses) {
    if (!(drop.quad > 0.0)) {
      throw NumericalFailure("drop witness has vanishing quadratic form");
    }
    x += (drop.x * drop.x.transpose()) / drop.quad;
  }

  std::map<int, double> y;
  for (const auto& [pos, weight] : y_prime) {
    const int original = record.kept_constraints.empty()
                             ? pos
                             : record.kept_constraints[pos];
    y[original] = weight;
  }
  return {SymMat::symmetrized(std::move(x)), std::move(y)};
}

NormalizedInstance normalize_passthrough(const PackCoverInstance& instance) {
  const int n = instance.dim();
  if (!instance.C.mat().isIdentity(1e-12)) {
    throw ValidationError(
        "pass-through normalization requires C = I (robust type2 families "
        "are solved in original form)");
  }
  NormalizedInstance out;
  out.variant = instance.variant;
  out.family = instance.constraints;
  out.dim = n;
  out.record.kind = instance.variant;
  out.record.L = Matrix::Identity(n, n);
  out.record.D_delta = Vector::Ones(n);
  out.record.scale_b = instance.original_b;
  for (int i = 0; i < instance.family_size(); ++i) {
    out.record.kept_constraints.push_back(i);
  }
  if (instance.variant == Variant::TypeI) {
    Matrix prefix = Matrix::Zero(n, n);
    for (int k = 0; k < instance.family_size(); ++k) {
      prefix += (instance.constraints.is_robust()
                     ? instance.constraints.robust[k].nominal.mat()
                     : instance.constraints.explicit_matrices[k].mat());
      if (eig_sym(SymMat::symmetrized(prefix)).min_eigenvalue() > 1e-10) {
        for (int i = 0; i <= k; ++i) out.initial_support.push_back(i);
        break;
      }
    }
    if (out.initial_support.empty()) {
      throw AssumptionB1Violated(
          "no prefix of the constraint list has a positive definite sum");
    }
  }
  return out;
}

}  // namespace pcsdp
