#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pcsdp/instance.hpp"
#include "pcsdp/normalization.hpp"
#include "pcsdp/rng.hpp"

namespace testutil {

using namespace pcsdp;

inline SymMat random_sym(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m(i, j) = m(j, i) = rng.uniform(lo, hi);
    }
  }
  return SymMat(m);
}

inline SymMat random_psd(int n, Rng& rng, double ridge = 0.0) {
  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = rng.normal();
  Matrix p = b * b.transpose() / n + ridge * Matrix::Identity(n, n);
  return SymMat::symmetrized(std::move(p));
}

inline SymMat diag_mat(const std::vector<double>& d) {
  Matrix m = Matrix::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return SymMat(m);
}

// Normalized instance (C = I, b = 1) over an explicit matrix list with an
// identity transform record.
inline NormalizedInstance make_normalized(Variant variant,
                                          std::vector<SymMat> matrices) {
  NormalizedInstance norm;
  norm.variant = variant;
  norm.dim = matrices[0].dim();
  const int m = static_cast<int>(matrices.size());
  norm.family.explicit_matrices = std::move(matrices);
  norm.record.kind = variant;
  norm.record.L = Matrix::Identity(norm.dim, norm.dim);
  norm.record.D_delta = Vector::Ones(norm.dim);
  norm.record.scale_b = Vector::Ones(m);
  for (int i = 0; i < m; ++i) norm.record.kept_constraints.push_back(i);
  if (variant == Variant::TypeI) {
    Matrix prefix = Matrix::Zero(norm.dim, norm.dim);
    for (int k = 0; k < m; ++k) {
      prefix += norm.family.explicit_matrices[k].mat();
      if (eig_sym(SymMat::symmetrized(prefix)).min_eigenvalue() > 1e-10) {
        for (int i = 0; i <= k; ++i) norm.initial_support.push_back(i);
        break;
      }
    }
  }
  return norm;
}

// Exact optimum of a diagonal covering LP (TypeI dual):
//   min y1 + y2  s.t.  y1 a1[j] + y2 a2[j] >= 1 for all j, y >= 0
// by vertex enumeration. Entries of a1, a2 must be positive.
inline double diag_cover_lp(const std::vector<double>& a1,
                            const std::vector<double>& a2) {
  const std::size_t n = a1.size();
  auto feasible = [&](double y1, double y2) {
    if (y1 < -1e-12 || y2 < -1e-12) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (y1 * a1[j] + y2 * a2[j] < 1.0 - 1e-9) return false;
    }
    return true;
  };
  double best = std::numeric_limits<double>::infinity();
  // Axis vertices.
  double t1 = 0.0, t2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    t1 = std::max(t1, 1.0 / a1[j]);
    t2 = std::max(t2, 1.0 / a2[j]);
  }
  if (feasible(t1, 0.0)) best = std::min(best, t1);
  if (feasible(0.0, t2)) best = std::min(best, t2);
  // Pairwise intersections.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const double det = a1[j] * a2[k] - a1[k] * a2[j];
      if (std::abs(det) < 1e-14) continue;
      const double y1 = (a2[k] - a2[j]) / det;
      const double y2 = (a1[j] - a1[k]) / det;
      if (feasible(y1, y2)) best = std::min(best, y1 + y2);
    }
  }
  return best;
}

// Exact optimum of a diagonal packing LP (TypeII dual):
//   max y1 + y2  s.t.  y1 a1[j] + y2 a2[j] <= 1 for all j, y >= 0.
inline double diag_pack_lp(const std::vector<double>& a1,
                           const std::vector<double>& a2) {
  const std::size_t n = a1.size();
  auto feasible = [&](double y1, double y2) {
    if (y1 < -1e-12 || y2 < -1e-12) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (y1 * a1[j] + y2 * a2[j] > 1.0 + 1e-9) return false;
    }
    return true;
  };
  double best = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  double t2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (a1[j] > 0) t1 = std::min(t1, 1.0 / a1[j]);
    if (a2[j] > 0) t2 = std::min(t2, 1.0 / a2[j]);
  }
  if (feasible(t1, 0.0)) best = std::max(best, t1);
  if (feasible(0.0, t2)) best = std::max(best, t2);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const double det = a1[j] * a2[k] - a1[k] * a2[j];
      if (std::abs(det) < 1e-14) continue;
      const double y1 = (a2[k] - a2[j]) / det;
      const double y2 = (a1[j] - a1[k]) / det;
      if (feasible(y1, y2)) best = std::max(best, y1 + y2);
    }
  }
  return best;
}

}  // namespace testutil
