#include "vw/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace vw;

namespace {

std::vector<double> random_array(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar reference kernels") {
  const std::vector<double> a{1.0, -2.0, 3.5}, b{0.5, 1.0, 3.0};
  CHECK(kernels::scalar::max_abs_diff(a.data(), b.data(), 3) == 3.0);
  std::vector<double> acc{1.0, 0.0, 0.0};
  kernels::scalar::accumulate_sq_diff(a.data(), b.data(), acc.data(), 3);
  CHECK(acc[0] == 1.25);
  CHECK(acc[1] == 9.0);
  CHECK(acc[2] == 0.25);
  CHECK(kernels::scalar::max_value(a.data(), 3) == 3.5);
  double lo = 0, hi = 0;
  kernels::scalar::minmax(a.data(), 3, &lo, &hi);
  CHECK(lo == -2.0);
  CHECK(hi == 3.5);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const kernels::Table& s = kernels::scalar_table();
  const kernels::Table& v = kernels::avx2_table();
  MESSAGE("active kernels: " << std::string(kernels::active_name()));
  std::mt19937_64 rng(2024);
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 33u, 1001u, 4099u}) {
    CAPTURE(n);
    const std::vector<double> a = random_array(rng, n), b = random_array(rng, n);
    CHECK(v.max_abs_diff(a.data(), b.data(), n) == s.max_abs_diff(a.data(), b.data(), n));
    std::vector<double> acc_s = random_array(rng, n);
    std::vector<double> acc_v = acc_s;
    s.accumulate_sq_diff(a.data(), b.data(), acc_s.data(), n);
    v.accumulate_sq_diff(a.data(), b.data(), acc_v.data(), n);
    CHECK(acc_s == acc_v);
    CHECK(v.max_value(a.data(), n) == s.max_value(a.data(), n));
    double lo_s, hi_s, lo_v, hi_v;
    s.minmax(a.data(), n, &lo_s, &hi_s);
    v.minmax(a.data(), n, &lo_v, &hi_v);
    CHECK(lo_s == lo_v);
    CHECK(hi_s == hi_v);
  }
}

TEST_CASE("dispatcher is consistent") {
  if (!kernels::avx2_supported()) CHECK(&kernels::avx2_table() == &kernels::scalar_table());
  CHECK(std::string(kernels::active_name()).size() > 0);
}
