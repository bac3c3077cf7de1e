#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcsdp/kernels.hpp"
#include "test_util.hpp"

using namespace pcsdp;
using testutil::random_psd;

TEST_CASE("batch_dot matches the serial reference bit for bit") {
  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 3 + rng.uniform_int(10);
    const int m = 1 + rng.uniform_int(64);
    std::vector<SymMat> mats;
    for (int i = 0; i < m; ++i) mats.push_back(random_psd(n, rng));
    SymMat y = random_psd(n, rng);
    std::vector<double> serial, parallel;
    batch_dot_serial(mats, y, serial);
    batch_dot(mats, y, parallel);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(serial[i] == parallel[i]);
    }
  }
}

TEST_CASE("simplex grid kernels agree bit for bit") {
  Rng rng(6);
  for (int m : {1, 2, 3}) {
    std::vector<SymMat> mats;
    for (int i = 0; i < m; ++i) mats.push_back(random_psd(4, rng));
    std::vector<double> serial, parallel;
    const long nodes_s =
        simplex_grid_extreme_serial(mats, 101, ExtremeKind::Min, serial);
    const long nodes_p =
        simplex_grid_extreme(mats, 101, ExtremeKind::Min, parallel);
    REQUIRE(nodes_s == nodes_p);
    for (long i = 0; i < nodes_s; ++i) CHECK(serial[i] == parallel[i]);
  }
}

TEST_CASE("simplex grid covers the vertices") {
  std::vector<SymMat> mats = {testutil::diag_mat({1, 3}),
                              testutil::diag_mat({2, 2})};
  std::vector<double> values;
  simplex_grid_extreme_serial(mats, 3, ExtremeKind::Max, values);
  // Nodes: w1 = 0, 1/2, 1.
  CHECK(values[0] == doctest::Approx(2));    // pure second matrix
  CHECK(values[2] == doctest::Approx(3));    // pure first matrix
  CHECK(values[1] == doctest::Approx(2.5));  // midpoint diag(1.5, 2.5)
}

TEST_CASE("four matrices are rejected") {
  std::vector<SymMat> mats(4, SymMat::identity(2));
  std::vector<double> values;
  CHECK_THROWS_AS(simplex_grid_extreme(mats, 5, ExtremeKind::Min, values),
                  TooLarge);
}
