#include "pcsdp/mwu.hpp"

#include <algorithm>
#include <cmath>

namespace pcsdp {

// ln n, floored to 1 only in the degenerate n = 1 case where the plain
// threshold would be zero and the loop would never run.
static double mwu_log_term(int n) {
  return n == 1 ? 1.0 : std::log(static_cast<double>(n));
}

long mwu_iteration_bound(int n, double eps) {
  if (n < 1 || !(eps > 0.0 && eps <= 0.5)) {
    throw ValidationError("mwu_iteration_bound requires n >= 1, eps in (0, 0.5]");
  }
  return static_cast<long>(std::ceil(n * mwu_log_term(n) / (eps * eps)));
}

MwuResult solve_mwu(const NormalizedInstance& normalized, double eps) {
  if (normalized.variant != Variant::TypeII) {
    throw ValidationError("the MWU solver handles type2 instances only");
  }
  if (normalized.family.is_robust()) {
    throw ValidationError("the MWU solver handles explicit families only");
  }
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw ValidationError("MWU eps must lie in (0, 0.5]");
  }
  const std::vector<SymMat>& a = normalized.matrices();
  const int n = normalized.dim;
  const int m = static_cast<int>(a.size());
  if (m == 0) throw EmptyFamily("constraint family is empty");

  // lambda_max per constraint is constant across iterations.
  std::vector<double> lam_max(m);
  for (int i = 0; i < m; ++i) {
    lam_max[i] = eig_sym(a[i]).max_eigenvalue();
    if (!(lam_max[i] > 0.0)) {
      throw ValidationError("constraint " + std::to_string(i) +
                            " has no positive spectrum");
    }
  }

  const double t_threshold = mwu_log_term(n) / (eps * eps);
  const double log_base = std::log1p(eps);

  MwuTrace trace;
  trace.iteration_bound = mwu_iteration_bound(n, eps);

  Matrix x = Matrix::Zero(n, n);
  Matrix f = Matrix::Zero(n, n);
  std::map<int, double> y;
  long t = 0;
  double big_m = 0.0;
  const long hard_cap = 4 * trace.iteration_bound + 16;

  while (true) {
    SpectralDecomp decomp = eig_sym(SymMat::symmetrized(f));
    big_m = t == 0 ? 0.0 : decomp.max_eigenvalue();
    if (big_m >= t_threshold) break;
    if (t >= hard_cap) {
      throw IterationCapExceeded("MWU exceeded its iteration cap", t);
    }

    // Weight matrix with the spectrum shifted by lambda_max; the scalar
    // factor (1+eps)^{lambda_max} cancels in P / tr(P).
    Vector powered =
        ((decomp.eigenvalues.array() - decomp.max_eigenvalue()) * log_base)
            .exp();
    Matrix p = decomp.basis * powered.asDiagonal() * decomp.basis.transpose();
    const double trace_p = p.trace();

    SymMat query = t == 0 ? SymMat::symmetrized(p / trace_p)
                          : SymMat::symmetrized(x);
    OracleAnswer ans = oracle_query(a, query, OracleMode::Min);

    const double delta = 1.0 / lam_max[ans.index];
    x += delta / trace_p * p;
    y[ans.index] += delta;
    f += delta * a[ans.index].mat();

    MwuTraceRecord rec;
    rec.t = t;
    rec.M = big_m;
    rec.L_running = t == 0 ? 0.0 : ans.value;
    rec.delta = delta;
    rec.oracle_index = ans.index;
    trace.records.push_back(rec);
    ++t;
  }

  SymMat x_final = SymMat::symmetrized(x);
  const double l_final = oracle_query(a, x_final, OracleMode::Min).value;
  if (!(l_final > 0.0)) {
    throw NumericalFailure("MWU terminated with a nonpositive primal value");
  }
  trace.final_L = l_final;
  trace.final_M = big_m;

  PrimalDualPair pair;
  pair.variant = Variant::TypeII;
  pair.solver = SolverKind::Mwu;
  pair.Xhat = SymMat::symmetrized(x_final.mat() / l_final);
  for (const auto& [idx, w] : y) pair.yhat[idx] = w / big_m;
  pair.primal_objective = pair.Xhat.trace();
  pair.dual_objective = 0.0;
  for (const auto& [idx, w] : pair.yhat) pair.dual_objective += w;
  pair.iterations = t;
  pair.phases = 1;
  pair.eps_final = eps;
  return {std::move(pair), std::move(trace)};
}

}  // namespace pcsdp
