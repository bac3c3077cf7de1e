#pragma once

#include "pcsdp/instance.hpp"
#include "pcsdp/normalization.hpp"

namespace pcsdp {

// Independent certificate for a primal-dual pair. Every number is
// recomputed from the pair and the instance alone (fresh eigendecomposition
// and inner products; no solver state is reused).
struct Certificate {
  double max_primal_violation = 0.0;   // TypeI: max_i A_i.X - 1; TypeII: 1 - min_i A_i.X
  double dual_spectral_residual = 0.0; // TypeI: 1 - lambda_min(sum y A); TypeII: lambda_max(sum y A) - 1
  double dual_extreme_eig = 0.0;       // the extreme eigenvalue itself
  double gap_ratio = 0.0;              // primal objective / dual objective
  int support_size = 0;
  bool iter_bound_satisfied = false;
  bool feasibility_pass = false;
  bool gap_pass = false;

  bool pass() const {
    return feasibility_pass && gap_pass && iter_bound_satisfied;
  }
};

// Acceptable gap-ratio interval for a pair given the producing solver's
// guarantees at the pair's final working accuracy.
struct GapWindow {
  double lo = 0.0;
  double hi = 0.0;
};

// Window from the solver claims alone (valid when the pair certifies the
// very instance the solver ran on).
GapWindow claim_gap_window(const PrimalDualPair& pair);

// Window widened by the normalization losses (objective perturbation for
// TypeI, trimming shift for TypeII) for pairs pulled back to the original
// instance.
GapWindow composed_gap_window(const PrimalDualPair& pair,
                              const TransformRecord& record);

// Certify against the instance the solver ran on (C = I implied).
Certificate certify(const NormalizedInstance& normalized,
                    const PrimalDualPair& pair, double eps);

// Certify a pulled-back pair against the original instance, with the gap
// window composed from the given transform record.
Certificate certify(const PackCoverInstance& instance,
                    const PrimalDualPair& pair, double eps,
                    const TransformRecord* record = nullptr);

// primalObjective / dualObjective. Raises DegenerateDual when the dual
// objective vanishes.
double duality_gap(const PrimalDualPair& pair);

// Ground-truth optimum for tiny normalized instances by simplex-grid search:
// the dual scales as y = s w with w on the simplex and the optimal scale is
// s = 1/lambda_min(F(w)) (TypeI, minimize s) or s = 1/lambda_max(F(w))
// (TypeII, maximize s), so the search reduces to the extreme eigenvalue over
// the weight simplex. grid is the number of samples per axis; the result is
// O(1/grid)-accurate by Lipschitz continuity of the extreme eigenvalues.
// Requires at most 3 explicit constraints and n <= 8.
double reference_optimum(const NormalizedInstance& normalized, long grid);

}  // namespace pcsdp
