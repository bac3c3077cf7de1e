#include "pcsdp/verification.hpp"

#include <algorithm>
#include <cmath>

#include "pcsdp/kernels.hpp"
#include "pcsdp/log_potential.hpp"
#include "pcsdp/mwu.hpp"

namespace pcsdp {

namespace {

// Dual combination sum_i y_i A_i, rebuilt from the pair alone. Robust pairs
// carry their dual measure as (index, delta, weight) atoms.
Matrix dual_combination(const ConstraintFamily& family,
                        const PrimalDualPair& pair) {
  const int n = family.is_robust()
                    ? family.robust[0].nominal.dim()
                    : family.explicit_matrices[0].dim();
  Matrix f = Matrix::Zero(n, n);
  if (!family.is_robust()) {
    for (const auto& [idx, w] : pair.yhat) {
      if (idx < 0 || idx >= family.size()) {
        throw ValidationError("dual weight index " + std::to_string(idx) +
                              " out of range");
      }
      f += w * family.explicit_matrices[idx].mat();
    }
    return f;
  }
  for (const DualAtom& atom : pair.dual_atoms) {
    const UncertainConstraint& uc = family.robust[atom.index];
    Matrix realized = uc.nominal.mat();
    for (int r = 0; r < uc.perturbation_count(); ++r) {
      realized += atom.delta[r] * uc.perturbations[r].mat();
    }
    f += atom.weight * realized;
  }
  return f;
}

Certificate certify_core(const SymMat* objective,
                         const ConstraintFamily& family,
                         const PrimalDualPair& pair, double eps,
                         const GapWindow& window) {
  if (family.size() == 0) throw EmptyFamily("constraint family is empty");
  const int n = pair.Xhat.dim();
  const int fam_dim = family.is_robust() ? family.robust[0].nominal.dim()
                                         : family.explicit_matrices[0].dim();
  if (fam_dim != n || (objective && objective->dim() != n)) {
    throw ValidationError("solution dimension does not match the instance");
  }

  Certificate cert;

  // Primal feasibility against every constraint (worst case for robust).
  if (pair.variant == Variant::TypeI) {
    OracleAnswer worst = oracle_query(family, pair.Xhat, OracleMode::Max);
    cert.max_primal_violation = worst.value - 1.0;
  } else {
    OracleAnswer worst = oracle_query(family, pair.Xhat, OracleMode::Min);
    cert.max_primal_violation = 1.0 - worst.value;
  }

  // Dual feasibility through a fresh eigendecomposition.
  SymMat dual_f = SymMat::symmetrized(dual_combination(family, pair));
  SpectralDecomp decomp = eig_sym(dual_f);
  if (pair.variant == Variant::TypeI) {
    cert.dual_extreme_eig = decomp.min_eigenvalue();
    cert.dual_spectral_residual = 1.0 - decomp.min_eigenvalue();
  } else {
    cert.dual_extreme_eig = decomp.max_eigenvalue();
    cert.dual_spectral_residual = decomp.max_eigenvalue() - 1.0;
  }

  // Objectives from scratch.
  const double primal = objective ? objective->dot(pair.Xhat)
                                  : pair.Xhat.trace();
  double dual = 0.0;
  for (const auto& [idx, w] : pair.yhat) dual += w;
  if (dual <= 0.0) throw DegenerateDual("dual objective is zero");
  cert.gap_ratio = primal / dual;

  cert.support_size = pair.support_size();
  cert.feasibility_pass = cert.max_primal_violation <= 1e-7 &&
                          cert.dual_spectral_residual <= 1e-7;
  cert.gap_pass = cert.gap_ratio >= window.lo && cert.gap_ratio <= window.hi;

  long bound;
  if (pair.solver == SolverKind::Mwu) {
    bound = mwu_iteration_bound(n, pair.eps_final);
  } else {
    bound = iteration_bound(n, pair.psi, eps, pair.variant);
  }
  cert.iter_bound_satisfied = pair.iterations <= bound;
  return cert;
}

}  // namespace

GapWindow claim_gap_window(const PrimalDualPair& pair) {
  const double e = pair.eps_final;
  GapWindow w;
  if (pair.solver == SolverKind::Mwu) {
    const double ratio = std::log1p(e) / e - e;
    w.lo = 1.0 - 1e-7;
    w.hi = 1.0 / ratio + 1e-9;
    return w;
  }
  if (pair.variant == Variant::TypeI) {
    const double c = (1.0 - e) / (1.0 + e);
    w.lo = c * c - 1e-9;
    w.hi = 1.0 + 1e-7;
  } else {
    const double c = (1.0 + e) / ((1.0 - 2.0 * e) * (1.0 - 2.0 * e));
    w.lo = 1.0 - 1e-7;
    w.hi = c + 1e-9;
  }
  return w;
}

GapWindow composed_gap_window(const PrimalDualPair& pair,
                              const TransformRecord& record) {
  GapWindow w = claim_gap_window(pair);
  const double e = record.eps;
  if (record.kind == Variant::TypeI) {
    // The objective perturbation costs at most eps * zeta <= eps * optimum.
    w.lo = std::max(w.lo - e * (1.0 + 1e-9), 0.0);
  } else if (record.shift > 0.0) {
    // De-perturbation scale plus the identity lift, with the measured trace
    // ratio folded into kappa at pull-back; 2*kappa covers beta vs beta'.
    const double kappa = 2.0;
    w.hi = (w.hi + 2.0 * e * kappa) / (1.0 - std::min(e * kappa, 0.9));
  }
  return w;
}

Certificate certify(const NormalizedInstance& normalized,
                    const PrimalDualPair& pair, double eps) {
  return certify_core(nullptr, normalized.family, pair, eps,
                      claim_gap_window(pair));
}

Certificate certify(const PackCoverInstance& instance,
                    const PrimalDualPair& pair, double eps,
                    const TransformRecord* record) {
  const bool identity_objective = instance.C.mat().isIdentity(1e-12);
  const GapWindow window = record ? composed_gap_window(pair, *record)
                                  : claim_gap_window(pair);
  return certify_core(identity_objective ? nullptr : &instance.C,
                      instance.constraints, pair, eps, window);
}

double duality_gap(const PrimalDualPair& pair) {
  if (pair.dual_objective == 0.0) {
    throw DegenerateDual("dual objective is zero");
  }
  return pair.primal_objective / pair.dual_objective;
}

double reference_optimum(const NormalizedInstance& normalized, long grid) {
  const std::vector<SymMat>& matrices = normalized.matrices();
  if (normalized.family.is_robust() || matrices.size() > 3) {
    throw TooLarge("reference oracle handles at most 3 explicit constraints");
  }
  if (normalized.dim > 8) {
    throw TooLarge("reference oracle handles n <= 8");
  }
  if (matrices.empty()) throw EmptyFamily("constraint family is empty");
  if (grid < 2) throw ValidationError("grid must have at least 2 points");

  std::vector<double> values;
  if (normalized.variant == Variant::TypeI) {
    // z* = min over the simplex of 1/lambda_min(F(w)); directions with
    // lambda_min <= 0 admit no feasible scale.
    simplex_grid_extreme(matrices, grid, ExtremeKind::Min, values);
    double best = 0.0;
    for (double v : values) best = std::max(best, v);
    if (!(best > 0.0)) {
      throw NumericalFailure("no grid direction has positive lambda_min");
    }
    return 1.0 / best;
  }
  simplex_grid_extreme(matrices, grid, ExtremeKind::Max, values);
  double best = std::numeric_limits<double>::infinity();
  for (double v : values) best = std::min(best, v);
  return 1.0 / best;
}

}  // namespace pcsdp
