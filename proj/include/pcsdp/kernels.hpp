#pragma once

#include <vector>

#include "pcsdp/linalg.hpp"

namespace pcsdp {

// Data-parallel inner kernels. Each kernel has an OpenMP variant and a
// serial reference; both produce bit-identical output because every entry
// is computed independently and reductions run over a materialized buffer
// in index order. The _serial versions are kept for testing and for the
// kernel benchmark.

// values[i] = matrices[i] . y (trace inner product) for all i.
void batch_dot_serial(const std::vector<SymMat>& matrices, const SymMat& y,
                      std::vector<double>& values);
void batch_dot(const std::vector<SymMat>& matrices, const SymMat& y,
               std::vector<double>& values);

enum class ExtremeKind { Min, Max };

// For every barycentric weight vector w on the m-point simplex grid with
// `points` samples per axis (m <= 3), evaluates the extreme eigenvalue of
// sum_i w_i matrices[i] and stores it in values (grid order: lexicographic
// in the grid indices). Returns the number of grid nodes.
long simplex_grid_extreme_serial(const std::vector<SymMat>& matrices,
                                 long points, ExtremeKind kind,
                                 std::vector<double>& values);
long simplex_grid_extreme(const std::vector<SymMat>& matrices, long points,
                          ExtremeKind kind, std::vector<double>& values);

}  // namespace pcsdp
