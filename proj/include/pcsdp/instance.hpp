#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pcsdp/linalg.hpp"

namespace pcsdp {

enum class Variant { TypeI, TypeII };
enum class OracleMode { Max, Min };

// Ellipsoidal uncertainty set E(delta0, D) = {delta >= 0 :
// (delta - delta0)^T D^{-1} (delta - delta0) <= 1}, D positive definite.
struct EllipsoidSet {
  Vector delta0;
  Matrix D;
};

// Box uncertainty set B(delta0, rho) = {delta >= 0 : ||delta - delta0||_1
// <= rho}.
struct BoxSet {
  Vector delta0;
  double rho = 0.0;
};

// Affinely perturbed constraint A(delta) = A0 + sum_r delta_r * A^r with
// delta ranging over an ellipsoid or box.
struct UncertainConstraint {
  SymMat nominal;
  std::vector<SymMat> perturbations;
  std::variant<EllipsoidSet, BoxSet> set;

  int perturbation_count() const {
    return static_cast<int>(perturbations.size());
  }
};

// Either an explicit list of PSD constraint matrices or a robust family of
// uncertain constraints.
struct ConstraintFamily {
  std::vector<SymMat> explicit_matrices;
  std::vector<UncertainConstraint> robust;

  bool is_robust() const { return !robust.empty(); }
  int size() const {
    return is_robust() ? static_cast<int>(robust.size())
                       : static_cast<int>(explicit_matrices.size());
  }
};

// A packing/covering SDP instance. After load the right-hand side is
// normalized to b = 1 (each constraint divided by its b_i); original_b keeps
// the pre-scaling values so reported duals can be unscaled on output.
struct PackCoverInstance {
  Variant variant = Variant::TypeI;
  SymMat C;
  Vector b;           // all ones after load-time normalization
  Vector original_b;  // the b the user supplied
  ConstraintFamily constraints;

  int dim() const { return C.dim(); }
  int family_size() const { return constraints.size(); }
};

// Answer of the Max/Min constraint oracle. For explicit families
// realized_matrix is the selected A_i; for robust families it is the
// worst-case realization A0 + sum delta*_r A^r, with delta_star recording
// the maximizer.
struct OracleAnswer {
  int index = -1;
  SymMat realized_matrix;
  double value = 0.0;
  std::optional<Vector> delta_star;
};

enum class SolverKind { LogPotential, Mwu };

// Atom of a robust dual measure: weight placed on realization
// A0_index + sum_r delta_r A^r_index.
struct DualAtom {
  int index = 0;
  double weight = 0.0;
  Vector delta;
};

// Primal matrix, sparse dual weights, and run bookkeeping produced by the
// solvers. eps_final is the working accuracy of the phase that produced the
// output iterate (the epsilon the optimality claims are stated with).
struct PrimalDualPair {
  SymMat Xhat;
  std::map<int, double> yhat;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  long iterations = 0;
  int phases = 0;
  double eps_final = 0.0;
  Variant variant = Variant::TypeI;
  SolverKind solver = SolverKind::LogPotential;
  double psi = 0.0;  // instance ratio measured from the first oracle answer
  std::vector<DualAtom> dual_atoms;  // populated for robust runs only

  int support_size() const;
};

// Worst-case realization of an uncertain constraint against Y: maximizes
// A(delta) . Y over the uncertainty set. Returns the maximizing delta and
// the attained value.
std::pair<Vector, double> robust_worst_case(const UncertainConstraint& uc,
                                            const SymMat& y);

// Exact constraint oracle: argmax (mode Max) or argmin (mode Min) of
// A_i . Y over the family, ties broken by lowest index. Robust families
// resolve each constraint to its worst-case realization first.
OracleAnswer oracle_query(const ConstraintFamily& family, const SymMat& y,
                          OracleMode mode);
OracleAnswer oracle_query(const PackCoverInstance& instance, const SymMat& y,
                          OracleMode mode);

// Same oracle over a bare list of matrices (the normalized-form entry point
// used by the solvers).
OracleAnswer oracle_query(const std::vector<SymMat>& matrices, const SymMat& y,
                          OracleMode mode);

}  // namespace pcsdp
