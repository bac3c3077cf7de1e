#pragma once

#include <vector>

#include "pcsdp/instance.hpp"
#include "pcsdp/normalization.hpp"

namespace pcsdp {

struct MwuTraceRecord {
  long t = 0;
  double M = 0.0;          // lambda_max of the dual combination
  double L_running = 0.0;  // min_i A_i . X at this iterate
  double delta = 0.0;
  int oracle_index = -1;
};

struct MwuTrace {
  std::vector<MwuTraceRecord> records;
  long iteration_bound = 0;
  double final_L = 0.0;  // min_i A_i . X at termination
  double final_M = 0.0;  // lambda_max of the dual combination at termination
};

struct MwuResult {
  PrimalDualPair pair;
  MwuTrace trace;
};

// ceil(n * eps^{-2} * ln n), with ln n floored to 1 at n = 1 so the loop
// still runs in that degenerate case.
long mwu_iteration_bound(int n, double eps);

// Matrix multiplicative-weights algorithm for normalized TypeII instances
// (explicit families only). The weight matrix is the base-(1+eps) matrix
// exponential of the dual combination, computed with the spectrum shifted
// by lambda_max so exponentiation can never overflow; the shift cancels in
// the normalized update direction P / tr(P). The degenerate t = 0 oracle
// call (X = 0 makes every value zero) queries the uniform weight direction
// P(0)/tr(P(0)) = I/n instead.
MwuResult solve_mwu(const NormalizedInstance& normalized, double eps);

}  // namespace pcsdp
