#include "pcsdp/log_potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcsdp/rng.hpp"

namespace pcsdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// g(theta) through a Cholesky solve of the shifted matrix; +inf when the
// shift is on the wrong side of the spectrum (treated as g >= 1 by both
// searches).
double g_via_solve(const SymMat& f, double theta, double eps_s,
                   Variant variant) {
  const int n = f.dim();
  Matrix shifted = variant == Variant::TypeI
                       ? Matrix(f.mat() - theta * Matrix::Identity(n, n))
                       : Matrix(theta * Matrix::Identity(n, n) - f.mat());
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) return kInf;
  const double tr = llt.solve(Matrix::Identity(n, n)).trace();
  return eps_s * theta / n * tr;
}

double g_via_eigs(const Vector& eigs, double theta, double eps_s,
                  Variant variant) {
  const int n = static_cast<int>(eigs.size());
  double tr = 0.0;
  for (int j = 0; j < n; ++j) {
    const double gap =
        variant == Variant::TypeI ? eigs[j] - theta : theta - eigs[j];
    if (gap <= 0.0) return kInf;
    tr += 1.0 / gap;
  }
  return eps_s * theta / n * tr;
}

// Bisection for the root of g on the exact eigenvalues, then a delta_s/4
// back-off on the approximation side. The back-off keeps the returned theta
// well inside the delta_s window while guaranteeing a g-margin below one
// that dwarfs the evaluation noise of the solve-based re-check.
double theta_by_bisection(const Vector& eigs, double eps_s, double delta_s,
                          Variant variant) {
  const double back_off = delta_s / 4.0;
  double lo, hi;
  if (variant == Variant::TypeI) {
    const double lam_min = eigs[0];
    if (!(lam_min > 0.0)) {
      throw NumericalFailure("TypeI root finding requires F positive definite");
    }
    lo = 0.0;
    hi = lam_min * (1.0 - 1e-14);
    if (g_via_eigs(eigs, hi, eps_s, variant) < 1.0) {
      return hi * (1.0 - back_off);
    }
  } else {
    const double lam_max = eigs[eigs.size() - 1];
    if (!(lam_max > 0.0)) {
      throw NumericalFailure("TypeII root finding requires lambda_max > 0");
    }
    lo = lam_max * (1.0 + 1e-14);
    hi = std::max(lam_max * 2.0, lam_max + 1.0);
    int doublings = 0;
    while (g_via_eigs(eigs, hi, eps_s, variant) >= 1.0) {
      hi *= 2.0;
      if (++doublings > 300) {
        throw NumericalFailure("TypeII root bracket did not close");
      }
    }
    if (g_via_eigs(eigs, lo, eps_s, variant) < 1.0) {
      return lo * (1.0 + back_off);
    }
  }
  // Invariant: g at the TypeI lo (TypeII hi) side is < 1, the other side
  // >= 1. Bisect until the bracket is tiny relative to the root.
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::abs(hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool below_one = g_via_eigs(eigs, mid, eps_s, variant) < 1.0;
    if (variant == Variant::TypeI) {
      if (below_one) lo = mid; else hi = mid;
    } else {
      if (below_one) hi = mid; else lo = mid;
    }
  }
  return variant == Variant::TypeI ? lo * (1.0 - back_off)
                                   : hi * (1.0 + back_off);
}

double find_theta_direct(const SymMat& f, double eps_s, double delta_s,
                         Variant variant) {
  return theta_by_bisection(eig_sym(f).eigenvalues, eps_s, delta_s, variant);
}

double find_theta_grid(const SymMat& f, double eps_s, double delta_s,
                       Variant variant, std::uint64_t seed) {
  const int n = f.dim();
  const double gamma = std::min(0.5, eps_s / (2.0 * n));

  double lo_theta;
  long grid_size;
  if (variant == Variant::TypeI) {
    // lambda_tilde in [(1-gamma) lambda_min, lambda_min] via the estimate on
    // F^{-1}.
    SymMat f_inv = shifted_inverse(f, 0.0, ShiftSide::FMinus);
    auto [val, vec] = lanczos_extreme_or_eig(f_inv, gamma, seed);
    if (!(val > 0.0)) throw NumericalFailure("inverse spectral estimate failed");
    const double lam_tilde = (1.0 - gamma) / val;
    lo_theta = lam_tilde / (1.0 + eps_s);
    grid_size = static_cast<long>(
        std::ceil(2.0 * std::log1p(eps_s) / delta_s));
  } else {
    // lambda_tilde in [lambda_max, lambda_max / (1-gamma)].
    auto [val, vec] = lanczos_extreme_or_eig(f, gamma, seed);
    if (!(val > 0.0)) throw NumericalFailure("spectral estimate failed");
    lo_theta = val / (1.0 - gamma);
    grid_size = static_cast<long>(
        std::ceil(-2.0 * std::log1p(-eps_s) / delta_s));
  }
  const double log_ratio = std::log1p(delta_s);
  auto grid_theta = [&](long k) {
    return lo_theta * std::exp(static_cast<double>(k) * log_ratio);
  };
  auto g_at = [&](long k) {
    return g_via_solve(f, grid_theta(k), eps_s, variant);
  };

  // The searches keep g < 1 on one side of the bracket and g >= 1 on the
  // other. A bracket end on the wrong side means the randomized estimate
  // missed its window; the deterministic root finder covers that case.
  if (variant == Variant::TypeI) {
    if (!(g_at(0) < 1.0) || !(g_at(grid_size) >= 1.0)) {
      return find_theta_direct(f, eps_s, delta_s, variant);
    }
    long lo = 0, hi = grid_size;
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      if (g_at(mid) < 1.0) lo = mid; else hi = mid;
    }
    return grid_theta(lo);
  }
  if (!(g_at(0) >= 1.0) || !(g_at(grid_size) < 1.0)) {
    return find_theta_direct(f, eps_s, delta_s, variant);
  }
  long lo = 0, hi = grid_size;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (g_at(mid) >= 1.0) lo = mid; else hi = mid;
  }
  return grid_theta(hi);
}

double potential_value(const Vector& eigs, double theta, double eps_s,
                       Variant variant) {
  const int n = static_cast<int>(eigs.size());
  double log_det = 0.0;
  for (int j = 0; j < n; ++j) {
    const double gap =
        variant == Variant::TypeI ? eigs[j] - theta : theta - eigs[j];
    if (gap <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    log_det += std::log(gap);
  }
  const double sign = variant == Variant::TypeI ? 1.0 : -1.0;
  return std::log(theta) + sign * eps_s / n * log_det;
}

}  // namespace

FamilyOracle::FamilyOracle(const ConstraintFamily& family) : family_(family) {}

int FamilyOracle::family_size() const { return family_.size(); }

OracleAnswer FamilyOracle::query(const SymMat& y, OracleMode mode) const {
  return oracle_query(family_, y, mode);
}

SymMat FamilyOracle::base_matrix(int i) const {
  if (!family_.is_robust()) return family_.explicit_matrices[i];
  // Center realization A0 + sum delta0_r A^r: always a member of the set.
  const UncertainConstraint& uc = family_.robust[i];
  const Vector& delta0 = std::holds_alternative<EllipsoidSet>(uc.set)
                             ? std::get<EllipsoidSet>(uc.set).delta0
                             : std::get<BoxSet>(uc.set).delta0;
  Matrix m = uc.nominal.mat();
  for (int r = 0; r < uc.perturbation_count(); ++r) {
    m += delta0[r] * uc.perturbations[r].mat();
  }
  return SymMat::symmetrized(std::move(m));
}

double find_theta(const SymMat& f, double eps_s, double delta_s,
                  Variant variant, std::uint64_t seed,
                  ThetaStrategy strategy) {
  if (!(eps_s > 0.0 && eps_s < 1.0) || !(delta_s > 0.0 && delta_s < 1.0)) {
    throw NumericalFailure("find_theta requires eps_s, delta_s in (0,1)");
  }
  const double theta =
      strategy == ThetaStrategy::DirectRoot || f.dim() <= 0
          ? find_theta_direct(f, eps_s, delta_s, variant)
          : find_theta_grid(f, eps_s, delta_s, variant, seed);

  const double g = g_via_solve(f, theta, eps_s, variant);
  if (!(g > 1.0 - eps_s - 1e-12) || !(g <= 1.0 + 1e-12)) {
    throw NumericalFailure("root approximation left the g window (g = " +
                           std::to_string(g) + ")");
  }
  return theta;
}

SymMat primal_from_theta(const SymMat& f, double theta, double eps_s,
                         Variant variant) {
  const int n = f.dim();
  const ShiftSide side =
      variant == Variant::TypeI ? ShiftSide::FMinus : ShiftSide::MinusF;
  SymMat inv = shifted_inverse(f, theta, side);
  SymMat x = SymMat::symmetrized(eps_s * theta / n * inv.mat());
  const double tr = x.trace();
  if (!(tr > 1.0 - eps_s - 1e-9) || !(tr <= 1.0 + 1e-9)) {
    throw NumericalFailure("primal iterate trace " + std::to_string(tr) +
                           " left (1 - eps_s, 1]");
  }
  return x;
}

long iteration_bound(int n, double psi, double eps, Variant variant) {
  if (!(psi > 0.0) || !std::isfinite(psi)) {
    psi = 1e300;  // degenerate ratio; keep the bound finite
  }
  const int phases = static_cast<int>(std::ceil(std::log2(1.0 / eps)));
  double total;
  if (variant == Variant::TypeI) {
    total = 480.0 * n * std::log(2.0 * psi);
    for (int s = 1; s <= phases; ++s) {
      const double eps_s = std::pow(2.0, -(s + 1));
      total += 600.0 * n / (eps_s * eps_s);
    }
  } else {
    total = 1920.0 * n * std::log(9.0 * psi / 8.0) + std::log(4.0 / 3.0);
    for (int s = 1; s <= phases; ++s) {
      const double eps_s = std::pow(2.0, -(s + 2));
      total += 1400.0 * n / (eps_s * eps_s);
    }
  }
  total = std::ceil(total);
  const double cap = 9e18;
  return static_cast<long>(std::min(total, cap));
}

SolveResult solve(const NormalizedInstance& normalized,
                  const ConstraintOracle& oracle, const SolverConfig& config) {
  if (!(config.eps > 0.0 && config.eps < 0.5)) {
    throw ValidationError("solver eps must lie in (0, 0.5)");
  }
  const Variant variant = normalized.variant;
  const int n = normalized.dim;
  const int m = oracle.family_size();
  if (m <= 0) throw EmptyFamily("constraint family is empty");
  const bool robust = normalized.family.is_robust();
  const OracleMode mode =
      variant == Variant::TypeI ? OracleMode::Max : OracleMode::Min;
  Rng rng(config.seed);

  // Dual weights y with a running scale: y_true = y_scale * y_stored, so the
  // convex-combination update is O(1) plus the touched index.
  std::vector<double> y_stored(m, 0.0);
  std::vector<char> in_support(m, 0);
  std::vector<int> support;
  double y_scale = 1.0;
  auto add_weight = [&](int i, double stored) {
    if (!in_support[i]) {
      in_support[i] = 1;
      support.push_back(i);
    }
    y_stored[i] += stored;
  };
  auto materialize_y = [&]() {
    std::map<int, double> y;
    for (int i : support) {
      const double w = y_scale * y_stored[i];
      if (w > 0.0) y[i] = w;
    }
    return y;
  };
  auto sum_y = [&]() {
    double s = 0.0;
    for (int i : support) s += y_stored[i];
    return y_scale * s;
  };

  // Robust dual measure atoms, in stored scale (true weight at time T is
  // stored * y_scale(T)).
  struct StoredAtom {
    int index;
    Vector delta;
    double stored;
  };
  std::vector<StoredAtom> atoms;
  auto atom_delta0 = [&](int i) {
    const UncertainConstraint& uc = normalized.family.robust[i];
    return std::holds_alternative<EllipsoidSet>(uc.set)
               ? std::get<EllipsoidSet>(uc.set).delta0
               : std::get<BoxSet>(uc.set).delta0;
  };

  // Initialization.
  Matrix f_mat = Matrix::Zero(n, n);
  int start_index = -1;
  double eps_s;
  int r_init = 0;
  if (variant == Variant::TypeI) {
    eps_s = 0.5;
    if (config.dense_init) {
      r_init = m;
      for (int i = 0; i < m; ++i) {
        add_weight(i, 1.0 / m);
        f_mat += oracle.base_matrix(i).mat() / m;
        if (robust) atoms.push_back({i, atom_delta0(i), 1.0 / m});
      }
    } else {
      if (normalized.initial_support.empty()) {
        throw AssumptionB1Violated(
            "TypeI solve needs an initial support with positive definite sum");
      }
      r_init = static_cast<int>(normalized.initial_support.size());
      for (int i : normalized.initial_support) {
        add_weight(i, 1.0 / r_init);
        f_mat += oracle.base_matrix(i).mat() / r_init;
        if (robust) atoms.push_back({i, atom_delta0(i), 1.0 / r_init});
      }
    }
  } else {
    eps_s = 0.25;
    // Start from the constraint with the largest lambda_max; a larger start
    // spectrum can only shrink the measured instance ratio.
    double best = -kInf;
    for (int i = 0; i < m; ++i) {
      const double lam = eig_sym(oracle.base_matrix(i)).max_eigenvalue();
      if (lam > best) {
        best = lam;
        start_index = i;
      }
    }
    add_weight(start_index, 1.0);
    f_mat = oracle.base_matrix(start_index).mat();
    if (robust) atoms.push_back({start_index, atom_delta0(start_index), 1.0});
    r_init = 1;
  }

  PotentialTrace trace;
  double nu = 1.0;
  long t = 0;
  int s = 0;
  long cap = config.max_iterations > 0 ? config.max_iterations : -1;

  struct Snapshot {
    double theta = 0.0;
    SymMat x;
    std::map<int, double> y;
    double eps_s = 0.0;
    std::size_t atom_count = 0;
    double atom_scale = 1.0;
    bool valid = false;
  } last;

  long since_recompute = 0;
  auto recompute_f = [&]() {
    f_mat.setZero();
    for (int i : support) {
      f_mat += (y_scale * y_stored[i]) * oracle.base_matrix(i).mat();
    }
  };

  bool ran_any_phase = false;
  while (eps_s > config.eps || !ran_any_phase) {
    ran_any_phase = true;
    const double delta_s = eps_s * eps_s * eps_s / (32.0 * n);
    // Each phase refreshes the iterate at least once so the output iterate
    // is always produced at the final phase accuracy its rescaling assumes.
    bool phase_ran = false;
    while (nu > eps_s || !phase_ran) {
      phase_ran = true;
      if (cap > 0 && t >= cap) {
        SolverCapExceeded err("iteration cap " + std::to_string(cap) +
                                  " exceeded",
                              t);
        err.trace = std::make_shared<PotentialTrace>(std::move(trace));
        throw err;
      }
      SymMat f_sym = SymMat::symmetrized(f_mat);
      const double theta = find_theta(f_sym, eps_s, delta_s, variant,
                                      rng.next_u64(), config.theta_strategy);
      SymMat x = primal_from_theta(f_sym, theta, eps_s, variant);
      OracleAnswer ans = oracle.query(x, mode);
      const double v_oracle = ans.value;
      const double v_avg = x.dot(f_sym);
      const double nu_new = variant == Variant::TypeI
                                ? (v_oracle - v_avg) / (v_oracle + v_avg)
                                : (v_avg - v_oracle) / (v_oracle + v_avg);

      if (t == 0) {
        // Instance ratio from the first oracle answer, then the safety cap.
        if (variant == Variant::TypeI) {
          if (config.dense_init) {
            trace.psi = m;
          } else {
            Matrix abar = Matrix::Zero(n, n);
            for (int i : normalized.initial_support) {
              abar += oracle.base_matrix(i).mat();
            }
            const double abar_min =
                eig_sym(SymMat::symmetrized(abar)).min_eigenvalue();
            const double lam_first =
                eig_sym(ans.realized_matrix).max_eigenvalue();
            trace.psi = r_init * lam_first / abar_min;
          }
        } else {
          const double lam_start =
              eig_sym(oracle.base_matrix(start_index)).max_eigenvalue();
          const double lam_first =
              eig_sym(ans.realized_matrix).min_eigenvalue();
          trace.psi = lam_first > 0.0 ? lam_start / lam_first : kInf;
        }
        trace.iteration_bound =
            iteration_bound(n, trace.psi, config.eps, variant);
        if (cap < 0) {
          cap = trace.iteration_bound > 9e17 ? 4e18
                                             : 4 * trace.iteration_bound;
        }
      }

      last.theta = theta;
      last.x = x;
      last.y = materialize_y();
      last.eps_s = eps_s;
      last.atom_count = atoms.size();
      last.atom_scale = y_scale;
      last.valid = true;

      if (config.trace_every > 0 && t % config.trace_every == 0) {
        TraceRecord rec;
        rec.t = t;
        rec.s = s;
        rec.eps_s = eps_s;
        rec.theta = theta;
        rec.nu = nu_new;
        rec.oracle_index = ans.index;
        rec.sum_y = sum_y();
        rec.g_theta = x.trace();
        rec.x_dot_f = v_avg;
        rec.phi = config.compute_phi
                      ? potential_value(eig_sym(f_sym).eigenvalues, theta,
                                        eps_s, variant)
                      : std::numeric_limits<double>::quiet_NaN();
        trace.records.push_back(rec);
      }

      if (!(nu_new > 0.0)) {
        // Oracle value met the average within rounding: the phase (and all
        // finer ones) terminate at this iterate with a zero-step update.
        nu = 0.0;
        ++t;
        break;
      }

      const double tau =
          eps_s * theta * nu_new / (4.0 * n * (v_oracle + v_avg));
      y_scale *= 1.0 - tau;
      add_weight(ans.index, tau / y_scale);
      if (robust) {
        atoms.push_back(
            {ans.index, ans.delta_star ? *ans.delta_star : Vector(),
             tau / y_scale});
      }
      if (y_scale < 1e-250) {
        for (int i : support) y_stored[i] *= y_scale;
        for (auto& atom : atoms) atom.stored *= y_scale;
        y_scale = 1.0;
      }
      f_mat = (1.0 - tau) * f_mat + tau * ans.realized_matrix.mat();
      if (++since_recompute >= 500 && !robust) {
        recompute_f();
        since_recompute = 0;
      }
      if (config.debug_check_spectrum) {
        SpectralDecomp d = eig_sym(SymMat::symmetrized(f_mat));
        const bool outside =
            variant == Variant::TypeI
                ? d.min_eigenvalue() > theta * (1.0 - 1e-10)
                : d.max_eigenvalue() < theta * (1.0 + 1e-10);
        if (!outside) {
          throw NumericalFailure(
              "updated combination crossed theta at iteration " +
              std::to_string(t));
        }
      }
      nu = nu_new;
      ++t;
    }
    ++s;
    eps_s *= 0.5;
  }

  if (!last.valid) {
    throw NumericalFailure("solver terminated without a completed iteration");
  }

  // Rescale the output iterate with the epsilon of the phase it was
  // produced in.
  const double eps_out = last.eps_s;
  const double theta_out = last.theta;
  PrimalDualPair pair;
  pair.variant = variant;
  pair.solver = SolverKind::LogPotential;
  const double primal_factor =
      variant == Variant::TypeI
          ? (1.0 - eps_out) / ((1.0 + eps_out) * (1.0 + eps_out) * theta_out)
          : (1.0 + eps_out) /
                ((1.0 - 2.0 * eps_out) * (1.0 - 2.0 * eps_out) * theta_out);
  pair.Xhat = SymMat::symmetrized(primal_factor * last.x.mat());
  for (const auto& [idx, w] : last.y) {
    pair.yhat[idx] = w / theta_out;
  }
  if (robust) {
    for (std::size_t k = 0; k < last.atom_count; ++k) {
      pair.dual_atoms.push_back({atoms[k].index,
                                 atoms[k].stored * last.atom_scale / theta_out,
                                 atoms[k].delta});
    }
  }
  pair.primal_objective = pair.Xhat.trace();
  pair.dual_objective = 0.0;
  for (const auto& [idx, w] : pair.yhat) pair.dual_objective += w;
  pair.iterations = t;
  pair.phases = s;
  pair.eps_final = eps_out;
  pair.psi = trace.psi;
  return {std::move(pair), std::move(trace)};
}

SolveResult solve(const NormalizedInstance& normalized,
                  const SolverConfig& config) {
  FamilyOracle oracle(normalized.family);
  return solve(normalized, oracle, config);
}

}  // namespace pcsdp
