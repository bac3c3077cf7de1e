#include "pcsdp/instance.hpp"

#include <algorithm>
#include <cmath>

#include "pcsdp/kernels.hpp"

namespace pcsdp {

int PrimalDualPair::support_size() const {
  int count = 0;
  for (const auto& [idx, w] : yhat) {
    if (w > 0.0) ++count;
  }
  return count;
}

std::pair<Vector, double> robust_worst_case(const UncertainConstraint& uc,
                                            const SymMat& y) {
  const int k = uc.perturbation_count();
  Vector gains(k);
  for (int r = 0; r < k; ++r) {
    // PSD . PSD, so negative values are rounding noise.
    gains[r] = std::max(uc.perturbations[r].dot(y), 0.0);
  }

  Vector delta_star;
  if (const auto* ell = std::get_if<EllipsoidSet>(&uc.set)) {
    Eigen::LLT<Matrix> llt(ell->D);
    if (ell->D.rows() != k || llt.info() != Eigen::Success) {
      throw InvalidUncertaintySet("ellipsoid matrix D is not positive definite");
    }
    const double quad = gains.dot(ell->D * gains);
    if (quad <= 0.0) {
      delta_star = ell->delta0;
    } else {
      delta_star = ell->delta0 + (ell->D * gains) / std::sqrt(quad);
    }
  } else {
    const auto& box = std::get<BoxSet>(uc.set);
    // All gains are nonnegative, so the L1 budget goes to one coordinate.
    int best = 0;
    for (int r = 1; r < k; ++r) {
      if (gains[r] > gains[best]) best = r;
    }
    delta_star = box.delta0;
    if (k > 0) delta_star[best] += box.rho;
  }

  double value = uc.nominal.dot(y);
  for (int r = 0; r < k; ++r) value += delta_star[r] * gains[r];
  return {delta_star, value};
}

namespace {

OracleAnswer pick_extreme(const std::vector<double>& values, OracleMode mode) {
  OracleAnswer ans;
  ans.index = 0;
  ans.value = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool better = mode == OracleMode::Max ? values[i] > ans.value
                                                : values[i] < ans.value;
    if (better) {
      ans.index = static_cast<int>(i);
      ans.value = values[i];
    }
  }
  return ans;
}

}  // namespace

OracleAnswer oracle_query(const std::vector<SymMat>& matrices, const SymMat& y,
                          OracleMode mode) {
  if (matrices.empty()) throw EmptyFamily("constraint family is empty");
  std::vector<double> values;
  batch_dot(matrices, y, values);
  OracleAnswer ans = pick_extreme(values, mode);
  ans.realized_matrix = matrices[ans.index];
  return ans;
}

OracleAnswer oracle_query(const ConstraintFamily& family, const SymMat& y,
                          OracleMode mode) {
  if (family.size() == 0) throw EmptyFamily("constraint family is empty");
  if (!family.is_robust()) {
    return oracle_query(family.explicit_matrices, y, mode);
  }

  const int m = family.size();
  std::vector<double> values(m);
  std::vector<Vector> deltas(m);
  for (int i = 0; i < m; ++i) {
    auto [delta, value] = robust_worst_case(family.robust[i], y);
    values[i] = value;
    deltas[i] = std::move(delta);
  }
  OracleAnswer ans = pick_extreme(values, mode);
  const UncertainConstraint& uc = family.robust[ans.index];
  Matrix realized = uc.nominal.mat();
  for (int r = 0; r < uc.perturbation_count(); ++r) {
    realized += deltas[ans.index][r] * uc.perturbations[r].mat();
  }
  ans.realized_matrix = SymMat::symmetrized(std::move(realized));
  ans.delta_star = deltas[ans.index];
  return ans;
}

OracleAnswer oracle_query(const PackCoverInstance& instance, const SymMat& y,
                          OracleMode mode) {
  return oracle_query(instance.constraints, y, mode);
}

}  // namespace pcsdp
