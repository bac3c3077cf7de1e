#include "pcsdp/kernels.hpp"

#include <cstdint>

#ifdef PCSDP_HAVE_OPENMP
#include <omp.h>
#endif

namespace pcsdp {

namespace {

// Grid node -> weight vector for the m-point simplex, m in {1,2,3}.
// points >= 2 grid samples per axis; node indices are lexicographic.
long simplex_node_count(int m, long points) {
  switch (m) {
    case 1:
      return 1;
    case 2:
      return points;
    case 3:
      return points * (points + 1) / 2;
    default:
      throw TooLarge("simplex grid supports at most 3 matrices");
  }
}

void node_weights(int m, long points, long node, double* w) {
  const double denom = static_cast<double>(points - 1);
  switch (m) {
    case 1:
      w[0] = 1.0;
      return;
    case 2:
      w[0] = static_cast<double>(node) / denom;
      w[1] = 1.0 - w[0];
      return;
    case 3: {
      // node enumerates pairs (a, b) with a + b <= points - 1.
      long a = 0;
      long remaining = node;
      long row = points;
      while (remaining >= row) {
        remaining -= row;
        --row;
        ++a;
      }
      const long b = remaining;
      w[0] = static_cast<double>(a) / denom;
      w[1] = static_cast<double>(b) / denom;
      w[2] = 1.0 - w[0] - w[1];
      return;
    }
    default:
      throw TooLarge("simplex grid supports at most 3 matrices");
  }
}

double extreme_eig_of_combo(const std::vector<SymMat>& matrices,
                            const double* w, ExtremeKind kind) {
  const int n = matrices[0].dim();
  Matrix f = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    if (w[i] != 0.0) f += w[i] * matrices[i].mat();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(f);
  return kind == ExtremeKind::Min ? solver.eigenvalues()[0]
                                  : solver.eigenvalues()[n - 1];
}

}  // namespace

void batch_dot_serial(const std::vector<SymMat>& matrices, const SymMat& y,
                      std::vector<double>& values) {
  values.resize(matrices.size());
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    values[i] = matrices[i].dot(y);
  }
}

void batch_dot(const std::vector<SymMat>& matrices, const SymMat& y,
               std::vector<double>& values) {
  values.resize(matrices.size());
  const std::int64_t m = static_cast<std::int64_t>(matrices.size());
#ifdef PCSDP_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (m > 8)
#endif
  for (std::int64_t i = 0; i < m; ++i) {
    values[i] = matrices[i].dot(y);
  }
}

long simplex_grid_extreme_serial(const std::vector<SymMat>& matrices,
                                 long points, ExtremeKind kind,
                                 std::vector<double>& values) {
  const int m = static_cast<int>(matrices.size());
  const long nodes = simplex_node_count(m, points);
  values.resize(nodes);
  double w[3];
  for (long node = 0; node < nodes; ++node) {
    node_weights(m, points, node, w);
    values[node] = extreme_eig_of_combo(matrices, w, kind);
  }
  return nodes;
}

long simplex_grid_extreme(const std::vector<SymMat>& matrices, long points,
                          ExtremeKind kind, std::vector<double>& values) {
  const int m = static_cast<int>(matrices.size());
  const long nodes = simplex_node_count(m, points);
  values.resize(nodes);
#ifdef PCSDP_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (nodes > 64)
#endif
  for (long node = 0; node < nodes; ++node) {
    double w[3];
    node_weights(m, points, node, w);
    values[node] = extreme_eig_of_combo(matrices, w, kind);
  }
  return nodes;
}

}  // namespace pcsdp
