// Benchmark comparing the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <vector>

#include "pcsdp/kernels.hpp"
#include "pcsdp/rng.hpp"

namespace {

using namespace pcsdp;

SymMat random_psd(int n, Rng& rng) {
  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = rng.normal();
  return SymMat::symmetrized(b * b.transpose());
}

template <typename F>
double time_ms(F&& fn, int repeats) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() /
         repeats;
}

}  // namespace

int main() {
  Rng rng(2024);

  {
    const int n = 64, m = 512;
    std::vector<SymMat> mats;
    for (int i = 0; i < m; ++i) mats.push_back(random_psd(n, rng));
    SymMat y = random_psd(n, rng);
    std::vector<double> serial_vals, parallel_vals;
    const double t_serial =
        time_ms([&] { batch_dot_serial(mats, y, serial_vals); }, 20);
    const double t_parallel =
        time_ms([&] { batch_dot(mats, y, parallel_vals); }, 20);
    bool match = serial_vals == parallel_vals;
    std::printf("batch_dot       n=%d m=%d   serial %8.3f ms   omp %8.3f ms   "
                "speedup %.2fx   identical=%s\n",
                n, m, t_serial, t_parallel, t_serial / t_parallel,
                match ? "yes" : "NO");
  }

  {
    const int n = 6;
    std::vector<SymMat> mats;
    for (int i = 0; i < 2; ++i) mats.push_back(random_psd(n, rng));
    std::vector<double> serial_vals, parallel_vals;
    const long grid = 20001;
    const double t_serial = time_ms(
        [&] {
          simplex_grid_extreme_serial(mats, grid, ExtremeKind::Min,
                                      serial_vals);
        },
        3);
    const double t_parallel = time_ms(
        [&] { simplex_grid_extreme(mats, grid, ExtremeKind::Min, parallel_vals); },
        3);
    bool match = serial_vals == parallel_vals;
    std::printf("grid_extreme    n=%d g=%ld serial %8.3f ms   omp %8.3f ms   "
                "speedup %.2fx   identical=%s\n",
                n, grid, t_serial, t_parallel, t_serial / t_parallel,
                match ? "yes" : "NO");
  }
  return 0;
}
