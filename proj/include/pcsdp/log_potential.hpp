#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "pcsdp/instance.hpp"
#include "pcsdp/normalization.hpp"

namespace pcsdp {

enum class ThetaStrategy { BinarySearch, DirectRoot };

struct SolverConfig {
  double eps = 0.1;              // target accuracy, in (0, 0.5)
  std::uint64_t seed = 0;        // drives all randomized sub-steps
  long max_iterations = 0;       // 0 = four times the proven bound
  ThetaStrategy theta_strategy = ThetaStrategy::BinarySearch;
  bool dense_init = false;       // uniform start over all m constraints
  int trace_every = 1;           // keep every k-th trace record
  bool compute_phi = false;      // evaluate the potential for the trace
  bool debug_check_spectrum = false;  // eig-verify theta stays outside the
                                      // spectrum of the updated combination
};

struct TraceRecord {
  long t = 0;
  int s = 0;
  double eps_s = 0.0;
  double theta = 0.0;
  double nu = 0.0;
  int oracle_index = -1;
  double phi = 0.0;     // NaN unless compute_phi was set
  double sum_y = 0.0;   // 1^T y at this iterate
  double g_theta = 0.0; // trace of the primal iterate, equals g(theta)
  double x_dot_f = 0.0;
};

struct PotentialTrace {
  std::vector<TraceRecord> records;
  double psi = 0.0;
  long iteration_bound = 0;
};

// Cap overrun carrying the partial trace for post-mortems.
struct SolverCapExceeded : IterationCapExceeded {
  using IterationCapExceeded::IterationCapExceeded;
  std::shared_ptr<PotentialTrace> trace;
};

// Pure constraint-oracle interface the solvers run against. base_matrix(i)
// returns a member realization of constraint i (the matrix itself for
// explicit families, the center realization for robust families); it is
// what the initial dual weights are placed on.
class ConstraintOracle {
 public:
  virtual ~ConstraintOracle() = default;
  virtual int family_size() const = 0;
  virtual OracleAnswer query(const SymMat& y, OracleMode mode) const = 0;
  virtual SymMat base_matrix(int i) const = 0;
};

// Oracle over a constraint family held by reference (the family must
// outlive the oracle).
class FamilyOracle : public ConstraintOracle {
 public:
  explicit FamilyOracle(const ConstraintFamily& family);
  int family_size() const override;
  OracleAnswer query(const SymMat& y, OracleMode mode) const override;
  SymMat base_matrix(int i) const override;

 private:
  const ConstraintFamily& family_;
};

// delta_s-approximation of the root theta* of
//   (eps_s * theta / n) * trace((F - theta I)^{-1}) = 1   (variant TypeI)
//   (eps_s * theta / n) * trace((theta I - F)^{-1}) = 1   (variant TypeII).
// TypeI returns theta in [(1-delta_s) theta*, theta*]; TypeII returns theta
// in [theta*, (1+delta_s) theta*]. The default strategy brackets the root
// with a randomized extreme-eigenvalue estimate and runs a geometric-grid
// binary search; DirectRoot bisects g on the eigenvalues of F. Both
// post-check g(theta) in (1 - eps_s, 1].
double find_theta(const SymMat& f, double eps_s, double delta_s,
                  Variant variant, std::uint64_t seed,
                  ThetaStrategy strategy = ThetaStrategy::BinarySearch);

// X = (eps_s * theta / n) (F - theta I)^{-1} (TypeI) or
//     (eps_s * theta / n) (theta I - F)^{-1} (TypeII).
// Asserts trace(X) in (1 - eps_s, 1].
SymMat primal_from_theta(const SymMat& f, double theta, double eps_s,
                         Variant variant);

// Proven iteration bound with explicit constants, summed over scaling
// phases s = 0..ceil(log2(1/eps)).
long iteration_bound(int n, double psi, double eps, Variant variant);

struct SolveResult {
  PrimalDualPair pair;
  PotentialTrace trace;
};

// Runs the scaling-phase logarithmic-potential algorithm for the given
// normalized instance. TypeI uses the Max oracle and the initial support
// from the normalization (or a uniform start with dense_init); TypeII uses
// the Min oracle starting from the constraint with the largest lambda_max.
SolveResult solve(const NormalizedInstance& normalized,
                  const ConstraintOracle& oracle, const SolverConfig& config);

// Convenience overload building a FamilyOracle over the normalized family.
SolveResult solve(const NormalizedInstance& normalized,
                  const SolverConfig& config);

}  // namespace pcsdp
