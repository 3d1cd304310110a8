#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "multirank/kernels.hpp"
#include "multirank/rng.hpp"

using namespace multirank;
namespace K = multirank::kernels;

namespace {

const std::size_t kSizes[] = {0, 1, 3, 4, 7, 8, 31, 64, 257, 1000, 4097};

struct Arrays {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::uint8_t> mask;
  std::vector<std::uint8_t> present;
};

Arrays make(DetRng& rng, std::size_t n) {
  Arrays a;
  a.x.resize(n);
  a.y.resize(n);
  a.mask.resize(n);
  a.present.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.x[i] = rng.unit() * 2.0 - 1.0;
    a.y[i] = rng.unit() * 2.0 - 1.0;
    a.mask[i] = static_cast<std::uint8_t>(rng.below(2));
    a.present[i] = static_cast<std::uint8_t>(rng.below(4) != 0);
  }
  return a;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels match naive definitions") {
  DetRng rng(11);
  const auto& ops = K::scalar_ops();
  for (std::size_t n : kSizes) {
    Arrays a = make(rng, n);

    double expect_sum = 0.0;
    for (double v : a.x) expect_sum += v;
    CHECK(ops.reduce_sum(a.x.data(), n) == doctest::Approx(expect_sum).epsilon(1e-13));

    double expect_masked = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (a.mask[i]) expect_masked += a.x[i];
    }
    CHECK(ops.sum_where(a.x.data(), a.mask.data(), n) ==
          doctest::Approx(expect_masked).epsilon(1e-13));

    std::vector<double> scaled = a.x;
    ops.scale(scaled.data(), n, 1.75);
    for (std::size_t i = 0; i < n; ++i) CHECK(scaled[i] == a.x[i] * 1.75);

    std::vector<double> edge(n);
    ops.edge_combine(a.x.data(), a.y.data(), n, 0.9, 1.1, edge.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(edge[i] == a.x[i] * 0.9 - 1.1 * a.y[i]);

    std::vector<std::uint8_t> fired(n);
    ops.threshold_ge(a.x.data(), a.present.data(), n, 0.25, 1, fired.data());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(fired[i] == (a.present[i] ? (a.x[i] >= 0.25 ? 1 : 0) : 1));
    }
  }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!K::avx2_supported()) {
    MESSAGE("avx2 unavailable; skipping");
    return;
  }
  const auto& scalar = K::scalar_ops();
  const auto& simd = K::avx2_ops();
  DetRng rng(23);

  for (std::size_t n : kSizes) {
    for (int rep = 0; rep < 4; ++rep) {
      Arrays a = make(rng, n);

      // reductions: reassociation tolerance only
      double s1 = scalar.reduce_sum(a.x.data(), n);
      double s2 = simd.reduce_sum(a.x.data(), n);
      CHECK(std::fabs(s1 - s2) <= 1e-13 * (1.0 + static_cast<double>(n)));

      double m1 = scalar.sum_where(a.x.data(), a.mask.data(), n);
      double m2 = simd.sum_where(a.x.data(), a.mask.data(), n);
      CHECK(std::fabs(m1 - m2) <= 1e-13 * (1.0 + static_cast<double>(n)));

      // elementwise ops: bit-for-bit
      std::vector<double> lhs = a.x, rhs = a.x;
      scalar.scale(lhs.data(), n, 0.37);
      simd.scale(rhs.data(), n, 0.37);
      CHECK(bitwise_equal(lhs, rhs));

      lhs = a.x;
      rhs = a.x;
      scalar.scale_where(lhs.data(), a.mask.data(), n, 1.4142135623730951);
      simd.scale_where(rhs.data(), a.mask.data(), n, 1.4142135623730951);
      CHECK(bitwise_equal(lhs, rhs));

      lhs = a.y;
      rhs = a.y;
      scalar.axpy_where(lhs.data(), a.mask.data(), n, -0.625);
      simd.axpy_where(rhs.data(), a.mask.data(), n, -0.625);
      CHECK(bitwise_equal(lhs, rhs));

      std::vector<double> e1(n), e2(n);
      scalar.edge_combine(a.x.data(), a.y.data(), n, 0.83, 1.29, e1.data());
      simd.edge_combine(a.x.data(), a.y.data(), n, 0.83, 1.29, e2.data());
      CHECK(bitwise_equal(e1, e2));

      std::vector<std::uint8_t> f1(n), f2(n);
      scalar.threshold_ge(a.x.data(), a.present.data(), n, -0.1, 0, f1.data());
      simd.threshold_ge(a.x.data(), a.present.data(), n, -0.1, 0, f2.data());
      CHECK(f1 == f2);
    }
  }
}

TEST_CASE("kernel selection") {
  const auto& before = K::active();
  K::force("scalar");
  CHECK(std::string(K::active().name) == "scalar");
  K::force("auto");
  if (K::avx2_supported()) {
    K::force("avx2");
    CHECK(std::string(K::active().name) == "avx2");
  }
  CHECK_THROWS(K::force("avx512"));
  K::force("auto");
  CHECK(std::string(K::active().name) == std::string(before.name));
}
