#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pcsdp/instance.hpp"

namespace pcsdp {

// Constraint dropped by the range-support filter, with a certifying witness:
// C x = 0 while A_index x != 0, and quad = x^T A_index x used by the rank-one
// primal repair at pull-back.
struct DropWitness {
  int index = 0;
  Vector x;
  double quad = 0.0;
};

// Invertible record of the congruence (and perturbation / trimming) that
// produced a normalized instance, sufficient to pull solutions back.
struct TransformRecord {
  Variant kind = Variant::TypeI;
  Matrix L;        // unit lower-triangular factor of C = L D L^T
  Vector D_delta;  // Type1: full D(delta) diagonal; Type2: positive entries D'
  std::vector<int> positive_columns;  // Type2: column indices kept in D'
  double delta = 0.0;                 // Type1 perturbation magnitude
  std::vector<int> kept_constraints;  // original indices of the kept family
  std::vector<DropWitness> drop_witnesses;  // Type2 support-filter drops
  double shift = 0.0;       // Type2: eps * beta' / n' identity shift
  double beta_prime = 0.0;  // Type2: min_i lambda'_max(A'_i)
  double eps = 0.0;         // accuracy the normalization was run with
  Vector scale_b;           // original right-hand side

  bool is_identity() const;
};

// Instance brought to normalized form (C = I, b = 1): the transformed
// constraint family, effective dimension, and the transform record. For
// TypeI instances initial_support lists indices whose matrices sum to a
// positive definite matrix.
struct NormalizedInstance {
  Variant variant = Variant::TypeI;
  ConstraintFamily family;
  int dim = 0;
  TransformRecord record;
  std::vector<int> initial_support;
  std::vector<std::string> warnings;

  const std::vector<SymMat>& matrices() const {
    return family.explicit_matrices;
  }
  int family_size() const { return family.size(); }
};

// Brings a TypeI instance to normalized form. When C is singular it is
// perturbed to C(delta) = C + delta * L Ibar L^T with
// delta = eps * zeta / (trace_bound * L.L^T); the congruence by
// D(delta)^{-1/2} L^{-1} then maps C(delta) to the identity. The r-prefix of
// constraints whose sum is positive definite is discovered by a scan; raises
// AssumptionB1Violated when no prefix works.
NormalizedInstance normalize_type1(const PackCoverInstance& instance,
                                   double eps);

// Inverse congruence for TypeI: X = L^{-T} D(delta)^{-1/2} X'
// D(delta)^{-1/2} L^{-1}; dual weights are unchanged.
std::pair<SymMat, std::map<int, double>> pull_back_type1(
    const TransformRecord& record, const SymMat& x_prime,
    const std::map<int, double>& y_prime);

// Range-support test: Contained when range(A) is inside range(C), otherwise
// a witness x with C x = 0 and A x != 0.
struct SupportContained {};
struct SupportWitness {
  Vector x;
};
using SupportCheck = std::variant<SupportContained, SupportWitness>;
SupportCheck check_support(const SymMat& c, const SymMat& a);

// Brings a TypeII instance to normalized form: drops constraints failing
// the range-support test (recording witnesses), reduces to the rank of C via
// the positive part of its LDL factorization, trims constraints whose
// approximate lambda_max exceeds n' beta' / eps, and shifts the kept ones by
// (eps beta'/n') I. Raises EmptyAfterSupportFilter when nothing survives.
NormalizedInstance normalize_type2(const PackCoverInstance& instance,
                                   double eps, std::uint64_t seed = 0);

// Inverse transform for TypeII: undoes the identity shift (scaling by
// 1/(1 - eps*kappa) with kappa = max(1, beta' tr(X')/n'), which reduces to
// the plain de-perturbation when tr(X') respects the n'/beta' trace bound),
// maps through the congruence, and repairs each dropped constraint with its
// rank-one witness term. Dual weights extend by zeros on dropped indices.
std::pair<SymMat, std::map<int, double>> pull_back_type2(
    const TransformRecord& record, const SymMat& x_prime,
    const std::map<int, double>& y_prime,
    const std::vector<DropWitness>& drop_witnesses);

// Pass-through normalization for instances already in normalized form
// (used for robust TypeII families, which are solved in original form).
NormalizedInstance normalize_passthrough(const PackCoverInstance& instance);

}  // namespace pcsdp
