#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pcsdp/log_potential.hpp"
#include "pcsdp/verification.hpp"
#include "test_util.hpp"

using namespace pcsdp;
using testutil::diag_mat;
using testutil::make_normalized;
using testutil::random_psd;

TEST_CASE("certify accepts an exact optimum") {
  // Single constraint A = I in dimension 2: optimum Xhat = I/2, yhat = {0: 1}.
  NormalizedInstance norm =
      make_normalized(Variant::TypeII, {SymMat::identity(2)});
  PrimalDualPair pair;
  pair.variant = Variant::TypeII;
  pair.Xhat = SymMat::symmetrized(0.5 * Matrix::Identity(2, 2));
  pair.yhat = {{0, 1.0}};
  pair.primal_objective = 1.0;
  pair.dual_objective = 1.0;
  pair.iterations = 1;
  pair.phases = 1;
  pair.eps_final = 0.25;
  pair.psi = 1.0;
  Certificate cert = certify(norm, pair, 0.25);
  CHECK(cert.max_primal_violation <= 1e-12);
  CHECK(cert.dual_spectral_residual <= 1e-12);
  CHECK(cert.gap_ratio == doctest::Approx(1.0));
  CHECK(cert.pass());
}

TEST_CASE("certify flags a corrupted dual") {
  NormalizedInstance norm =
      make_normalized(Variant::TypeII, {SymMat::identity(2)});
  PrimalDualPair pair;
  pair.variant = Variant::TypeII;
  pair.Xhat = SymMat::symmetrized(0.5 * Matrix::Identity(2, 2));
  pair.yhat = {{0, 0.9}};  // scaled down: lambda_max breaks 1 on the low side
  pair.primal_objective = 1.0;
  pair.dual_objective = 0.9;
  pair.eps_final = 0.25;
  Certificate cert = certify(norm, pair, 0.25);
  // For TypeII the corruption shows up in the gap ratio leaving its window.
  CHECK(cert.gap_ratio == doctest::Approx(1.0 / 0.9));

  // TypeI: scaling the dual down breaks lambda_min >= 1.
  NormalizedInstance norm1 =
      make_normalized(Variant::TypeI, {SymMat::identity(2)});
  PrimalDualPair pair1;
  pair1.variant = Variant::TypeI;
  pair1.Xhat = SymMat::symmetrized(0.5 * Matrix::Identity(2, 2));
  pair1.yhat = {{0, 0.9}};
  pair1.primal_objective = 1.0;
  pair1.dual_objective = 0.9;
  pair1.eps_final = 0.25;
  Certificate cert1 = certify(norm1, pair1, 0.25);
  CHECK(cert1.dual_spectral_residual > 0.05);
  CHECK_FALSE(cert1.feasibility_pass);
}

TEST_CASE("certify passes solver output end to end") {
  Rng rng(501);
  std::vector<SymMat> mats;
  for (int i = 0; i < 3; ++i) mats.push_back(random_psd(3, rng, 0.2));
  NormalizedInstance norm = make_normalized(Variant::TypeI, mats);
  SolverConfig config;
  config.eps = 0.1;
  config.theta_strategy = ThetaStrategy::DirectRoot;
  SolveResult result = solve(norm, config);
  Certificate cert = certify(norm, result.pair, 0.1);
  CHECK(cert.feasibility_pass);
  CHECK(cert.gap_pass);
  CHECK(cert.iter_bound_satisfied);
}

TEST_CASE("reference_optimum closed forms") {
  NormalizedInstance single =
      make_normalized(Variant::TypeII, {SymMat::identity(3)});
  CHECK(reference_optimum(single, 11) == doctest::Approx(1.0));

  NormalizedInstance pair = make_normalized(
      Variant::TypeI, {diag_mat({2, 1}), diag_mat({1, 2})});
  const double z = reference_optimum(pair, 10001);
  CHECK(std::abs(z - 2.0 / 3.0) <= 1e-3);
}

TEST_CASE("reference_optimum matches the diagonal LP oracle") {
  Rng rng(503);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> a1, a2;
    for (int j = 0; j < 3; ++j) {
      a1.push_back(rng.uniform(0.5, 3.0));
      a2.push_back(rng.uniform(0.5, 3.0));
    }
    NormalizedInstance cover =
        make_normalized(Variant::TypeI, {diag_mat(a1), diag_mat(a2)});
    CHECK(std::abs(reference_optimum(cover, 4001) -
                   testutil::diag_cover_lp(a1, a2)) <= 2e-3);
    NormalizedInstance pack =
        make_normalized(Variant::TypeII, {diag_mat(a1), diag_mat(a2)});
    CHECK(std::abs(reference_optimum(pack, 4001) -
                   testutil::diag_pack_lp(a1, a2)) <= 2e-3);
  }
}

TEST_CASE("reference_optimum grid convergence") {
  Rng rng(505);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<SymMat> mats = {random_psd(3, rng, 0.2),
                                random_psd(3, rng, 0.2)};
    NormalizedInstance norm = make_normalized(Variant::TypeI, mats);
    const long g = 500;
    const double coarse = reference_optimum(norm, g);
    const double fine = reference_optimum(norm, 2 * g);
    CHECK(std::abs(coarse - fine) <= 2.0 / g * std::max(1.0, coarse));
  }
}

TEST_CASE("reference_optimum rejects oversized inputs") {
  std::vector<SymMat> four(4, SymMat::identity(2));
  NormalizedInstance norm = make_normalized(Variant::TypeII, four);
  CHECK_THROWS_AS(reference_optimum(norm, 11), TooLarge);
}

TEST_CASE("duality_gap basics") {
  PrimalDualPair pair;
  pair.Xhat = SymMat::identity(1);
  pair.primal_objective = 1.5;
  pair.dual_objective = 1.5;
  CHECK(duality_gap(pair) == doctest::Approx(1.0));
  pair.dual_objective = 0.0;
  CHECK_THROWS_AS(duality_gap(pair), DegenerateDual);
}
