#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pcsdp/log_potential.hpp"
#include "test_util.hpp"

using namespace pcsdp;
using testutil::diag_mat;
using testutil::make_normalized;
using testutil::random_psd;

namespace {

// Scalar reference root of g for an explicit eigenvalue list, bisected to
// 1e-12: the independent oracle for find_theta.
double reference_theta(const std::vector<double>& eigs, double eps_s,
                       Variant variant) {
  auto g = [&](double x) {
    double tr = 0.0;
    for (double lam : eigs) {
      tr += 1.0 / (variant == Variant::TypeI ? lam - x : x - lam);
    }
    return eps_s * x / eigs.size() * tr;
  };
  double lo, hi;
  if (variant == Variant::TypeI) {
    lo = 0.0;
    hi = *std::min_element(eigs.begin(), eigs.end()) * (1 - 1e-12);
  } else {
    lo = *std::max_element(eigs.begin(), eigs.end()) * (1 + 1e-12);
    hi = lo * 4 / (1 - eps_s);
  }
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool below = g(mid) < 1.0;
    if (variant == Variant::TypeI) {
      (below ? lo : hi) = mid;
    } else {
      (below ? hi : lo) = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("find_theta analytic identity cases, both strategies") {
  const int n = 4;
  const SymMat id = SymMat::identity(n);
  for (ThetaStrategy strategy :
       {ThetaStrategy::BinarySearch, ThetaStrategy::DirectRoot}) {
    const double eps1 = 0.5, delta1 = eps1 * eps1 * eps1 / (32.0 * n);
    const double theta1 = find_theta(id, eps1, delta1, Variant::TypeI, 5,
                                     strategy);
    CHECK(std::abs(theta1 - 2.0 / 3.0) <= delta1 * 2.0 / 3.0);

    const double eps2 = 0.25, delta2 = eps2 * eps2 * eps2 / (32.0 * n);
    const double theta2 = find_theta(id, eps2, delta2, Variant::TypeII, 5,
                                     strategy);
    CHECK(theta2 >= 4.0 / 3.0 - 1e-12);
    CHECK(theta2 <= (1 + delta2) * 4.0 / 3.0);
  }
}

TEST_CASE("find_theta matches the scalar reference on diag(1,2)") {
  const SymMat f = diag_mat({1, 2});
  const double eps_s = 0.5;
  const double delta_s = eps_s * eps_s * eps_s / (32.0 * 2);
  const double theta_star = reference_theta({1, 2}, eps_s, Variant::TypeI);
  for (ThetaStrategy strategy :
       {ThetaStrategy::BinarySearch, ThetaStrategy::DirectRoot}) {
    const double theta =
        find_theta(f, eps_s, delta_s, Variant::TypeI, 11, strategy);
    CHECK(theta <= theta_star * (1 + 1e-10));
    CHECK(theta >= (1 - delta_s) * theta_star);
  }
}

TEST_CASE("find_theta window on random PD matrices") {
  Rng rng(301);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 2 + rng.uniform_int(7);
    SymMat f = random_psd(n, rng, 0.1);
    const double eps_s = 0.25;
    const double delta_s = eps_s * eps_s * eps_s / (32.0 * n);
    for (Variant variant : {Variant::TypeI, Variant::TypeII}) {
      SpectralDecomp d = eig_sym(f);
      std::vector<double> eigs(d.eigenvalues.data(),
                               d.eigenvalues.data() + n);
      const double theta_star = reference_theta(eigs, eps_s, variant);
      const double theta_grid = find_theta(f, eps_s, delta_s, variant,
                                           900 + rep,
                                           ThetaStrategy::BinarySearch);
      const double theta_direct = find_theta(f, eps_s, delta_s, variant,
                                             900 + rep,
                                             ThetaStrategy::DirectRoot);
      for (double theta : {theta_grid, theta_direct}) {
        if (variant == Variant::TypeI) {
          CHECK(theta >= (1 - delta_s) * theta_star * (1 - 1e-9));
          CHECK(theta <= theta_star * (1 + 1e-9));
        } else {
          CHECK(theta >= theta_star * (1 - 1e-9));
          CHECK(theta <= (1 + delta_s) * theta_star * (1 + 1e-9));
        }
      }
    }
  }
}

TEST_CASE("primal_from_theta analytic cases") {
  SymMat x1 = primal_from_theta(SymMat::identity(2), 2.0 / 3.0, 0.5,
                                Variant::TypeI);
  CHECK((x1.mat() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK(x1.trace() == doctest::Approx(1.0));

  SymMat x2 = primal_from_theta(SymMat::identity(2), 4.0 / 3.0, 0.25,
                                Variant::TypeII);
  CHECK((x2.mat() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("primal trace window holds for find_theta output") {
  Rng rng(303);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + rng.uniform_int(6);
    SymMat f = random_psd(n, rng, 0.1);
    const double eps_s = 0.125;
    const double delta_s = eps_s * eps_s * eps_s / (32.0 * n);
    const double theta = find_theta(f, eps_s, delta_s, Variant::TypeI,
                                    rep, ThetaStrategy::BinarySearch);
    SymMat x = primal_from_theta(f, theta, eps_s, Variant::TypeI);
    CHECK(x.trace() > 1.0 - eps_s);
    CHECK(x.trace() <= 1.0 + 1e-9);
  }
}

TEST_CASE("iteration_bound explicit constants") {
  // n=1, psi=1, eps=0.5: 480 ln 2 + 600/0.25^2.
  CHECK(iteration_bound(1, 1.0, 0.5, Variant::TypeI) == 9933);
  // Phase-0 term alone scales as 480 n ln(2 psi).
  const double expected2 = std::ceil(2 * (480.0 * std::log(2.0) + 9600.0));
  CHECK(iteration_bound(2, 1.0, 0.5, Variant::TypeI) ==
        static_cast<long>(expected2));
  // TypeII constants: phases s = 1, 2 have eps_s = 1/8, 1/16.
  const double t2 = 1920.0 * std::log(9.0 / 8.0) + std::log(4.0 / 3.0) +
                    1400.0 * 64.0 + 1400.0 * 256.0;
  CHECK(iteration_bound(1, 1.0, 0.25, Variant::TypeII) ==
        static_cast<long>(std::ceil(t2)));
}

TEST_CASE("solve: one-dimensional covering instance") {
  NormalizedInstance norm =
      make_normalized(Variant::TypeII, {diag_mat({2.0})});
  SolverConfig config;
  config.eps = 0.1;
  config.theta_strategy = ThetaStrategy::DirectRoot;
  SolveResult result = solve(norm, config);
  const PrimalDualPair& pair = result.pair;
  // Optimum is x = 1/2.
  CHECK(2.0 * pair.Xhat(0, 0) >= 1.0 - 1e-9);
  CHECK(pair.Xhat(0, 0) <= 0.5 * (1 + 5 * 0.25));
  CHECK(pair.dual_objective == doctest::Approx(0.5).epsilon(0.5));
  const double e = pair.eps_final;
  CHECK(pair.primal_objective / pair.dual_objective <=
        (1 + e) / ((1 - 2 * e) * (1 - 2 * e)) + 1e-9);
}

TEST_CASE("solve: diagonal packing instance against the LP optimum") {
  NormalizedInstance norm = make_normalized(
      Variant::TypeI, {diag_mat({2, 1}), diag_mat({1, 2})});
  SolverConfig config;
  config.eps = 0.1;
  config.seed = 4;
  config.theta_strategy = ThetaStrategy::DirectRoot;
  SolveResult result = solve(norm, config);
  const PrimalDualPair& pair = result.pair;

  const double z_star = testutil::diag_cover_lp({2, 1}, {1, 2});
  CHECK(z_star == doctest::Approx(2.0 / 3.0));
  CHECK(pair.primal_objective >= (1.0 - 5 * 0.1) * z_star);
  // Primal feasibility on both constraints.
  CHECK(norm.matrices()[0].dot(pair.Xhat) <= 1.0 + 1e-9);
  CHECK(norm.matrices()[1].dot(pair.Xhat) <= 1.0 + 1e-9);
  // Dual within the claim factor of the optimum.
  const double e = pair.eps_final;
  const double c = (1.0 - e) / (1.0 + e);
  CHECK(pair.primal_objective >= (c * c - 1e-9) * pair.dual_objective);
  CHECK(pair.dual_objective >= z_star - 1e-9);
}

TEST_CASE("solve: single-constraint fixed point terminates at once") {
  NormalizedInstance norm =
      make_normalized(Variant::TypeI, {SymMat::identity(3)});
  SolverConfig config;
  config.eps = 0.25;
  SolveResult result = solve(norm, config);
  const PrimalDualPair& pair = result.pair;
  CHECK(pair.support_size() == 1);
  CHECK(pair.yhat.count(0) == 1);
  CHECK(pair.dual_objective >= 1.0 - 1e-9);
  CHECK(pair.dual_objective <= 2.0);
  const double e = pair.eps_final;
  const double c = (1.0 - e) / (1.0 + e);
  CHECK(pair.primal_objective >= (c * c - 1e-9) * pair.dual_objective);
  CHECK(pair.iterations == 1);
}

TEST_CASE("solve invariants along the trace") {
  Rng rng(305);
  for (Variant variant : {Variant::TypeI, Variant::TypeII}) {
    std::vector<SymMat> mats;
    for (int i = 0; i < 4; ++i) mats.push_back(random_psd(4, rng, 0.2));
    NormalizedInstance norm = make_normalized(variant, mats);
    SolverConfig config;
    config.eps = 0.1;
    config.seed = 17;
    config.theta_strategy = ThetaStrategy::DirectRoot;
    config.compute_phi = true;
    config.debug_check_spectrum = true;
    SolveResult result = solve(norm, config);

    double prev_phi = std::numeric_limits<double>::quiet_NaN();
    int prev_s = -1;
    double prev_nu = 0.0;
    for (const TraceRecord& rec : result.trace.records) {
      CHECK(std::abs(rec.sum_y - 1.0) <= 1e-10);
      CHECK(rec.g_theta > 1.0 - rec.eps_s - 1e-12);
      CHECK(rec.g_theta <= 1.0 + 1e-12);
      if (variant == Variant::TypeI) {
        CHECK(rec.x_dot_f > rec.theta * (1 - 1e-12));
        CHECK(rec.x_dot_f < (1 + rec.eps_s) * rec.theta * (1 + 1e-12));
      } else {
        CHECK(rec.x_dot_f > (1 - 2 * rec.eps_s) * rec.theta * (1 - 1e-12));
        CHECK(rec.x_dot_f <= (1 - rec.eps_s) * rec.theta * (1 + 1e-12));
      }
      if (rec.s == prev_s) {
        // Potential moves by at least eps_s nu^2 / (40 n) per step, toward
        // the variant's direction.
        const double gain = variant == Variant::TypeI ? rec.phi - prev_phi
                                                      : prev_phi - rec.phi;
        CHECK(gain >= rec.eps_s * prev_nu * prev_nu / (40.0 * 4) - 1e-9);
      }
      prev_phi = rec.phi;
      prev_s = rec.s;
      prev_nu = rec.nu;
    }

    // Support bound: iterations + r touched indices at most.
    const int r = variant == Variant::TypeI
                      ? static_cast<int>(norm.initial_support.size())
                      : 1;
    CHECK(result.pair.support_size() <=
          result.pair.iterations + r);
    CHECK(result.pair.iterations <= result.trace.iteration_bound);
  }
}

TEST_CASE("solve is deterministic for a fixed seed") {
  Rng rng(307);
  std::vector<SymMat> mats;
  for (int i = 0; i < 3; ++i) mats.push_back(random_psd(3, rng, 0.2));
  NormalizedInstance norm = make_normalized(Variant::TypeII, mats);
  SolverConfig config;
  config.eps = 0.1;
  config.seed = 99;
  SolveResult a = solve(norm, config);
  SolveResult b = solve(norm, config);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
    CHECK(a.trace.records[i].theta == b.trace.records[i].theta);
    CHECK(a.trace.records[i].nu == b.trace.records[i].nu);
    CHECK(a.trace.records[i].oracle_index == b.trace.records[i].oracle_index);
  }
  CHECK((a.pair.Xhat.mat() - b.pair.Xhat.mat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("iteration cap raises with the count attached") {
  Rng rng(309);
  std::vector<SymMat> mats;
  for (int i = 0; i < 5; ++i) mats.push_back(random_psd(4, rng, 0.1));
  NormalizedInstance norm = make_normalized(Variant::TypeI, mats);
  SolverConfig config;
  config.eps = 0.05;
  config.max_iterations = 3;
  try {
    solve(norm, config);
    FAIL("expected IterationCapExceeded");
  } catch (const IterationCapExceeded& e) {
    CHECK(e.iterations == 3);
  }
}

TEST_CASE("robust family solves through the worst-case oracle") {
  Rng rng(313);
  const int n = 3;
  NormalizedInstance norm;
  norm.variant = Variant::TypeI;
  norm.dim = n;
  norm.record.kind = Variant::TypeI;
  norm.record.L = Matrix::Identity(n, n);
  norm.record.D_delta = Vector::Ones(n);
  for (int i = 0; i < 3; ++i) {
    UncertainConstraint uc;
    uc.nominal = random_psd(n, rng, 0.3);
    uc.perturbations = {random_psd(n, rng)};
    Vector delta0(1);
    delta0 << 0.2;
    uc.set = BoxSet{delta0, 0.1};
    norm.family.robust.push_back(std::move(uc));
  }
  norm.initial_support = {0};  // nominal of the first constraint is PD
  norm.record.kept_constraints = {0, 1, 2};
  norm.record.scale_b = Vector::Ones(3);

  SolverConfig config;
  config.eps = 0.15;
  config.seed = 21;
  SolveResult result = solve(norm, config);
  const PrimalDualPair& pair = result.pair;
  REQUIRE(!pair.dual_atoms.empty());

  // Worst-case primal feasibility: the oracle maximum over all families.
  OracleAnswer worst = oracle_query(norm.family, pair.Xhat, OracleMode::Max);
  CHECK(worst.value <= 1.0 + 1e-9);

  // The dual measure reconstructed from its atoms dominates the identity.
  Matrix dual = Matrix::Zero(n, n);
  double atom_sum = 0.0;
  for (const DualAtom& atom : pair.dual_atoms) {
    const UncertainConstraint& uc = norm.family.robust[atom.index];
    Matrix realized = uc.nominal.mat();
    for (int r = 0; r < uc.perturbation_count(); ++r) {
      realized += atom.delta[r] * uc.perturbations[r].mat();
    }
    dual += atom.weight * realized;
    atom_sum += atom.weight;
  }
  CHECK(eig_sym(SymMat::symmetrized(dual)).min_eigenvalue() >= 1.0);
  CHECK(atom_sum == doctest::Approx(pair.dual_objective).epsilon(1e-9));
}

TEST_CASE("dense initialization touches every constraint and sets psi = m") {
  Rng rng(311);
  std::vector<SymMat> mats;
  for (int i = 0; i < 6; ++i) mats.push_back(random_psd(3, rng, 0.2));
  NormalizedInstance norm = make_normalized(Variant::TypeI, mats);
  SolverConfig config;
  config.eps = 0.2;
  config.dense_init = true;
  SolveResult result = solve(norm, config);
  CHECK(result.trace.psi == doctest::Approx(6.0));
  CHECK(result.pair.support_size() >= 6);
}
