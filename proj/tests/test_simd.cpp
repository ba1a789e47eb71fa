#include <random>

#include "ctxlab/simd.hpp"
#include "doctest.h"

using namespace ctxlab;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
  if (!simd::supported(simd::Isa::Avx2)) {
    MESSAGE("avx2 not available, comparing scalar with itself");
  }
  const auto& s = simd::detail::scalar_kernels();
  const auto& v = simd::supported(simd::Isa::Avx2) ? simd::detail::avx2_kernels() : s;
  std::mt19937_64 rng(3);
  for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 9, 16, 31, 64, 257}) {
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n);
    const double a = 0.37;

    auto y1 = y, y2 = y;
    s.axpy(a, x.data(), y1.data(), n);
    v.axpy(a, x.data(), y2.data(), n);
    CHECK(y1 == y2);  // bitwise

    auto x1 = x, x2 = x;
    s.scale(-1.5, x1.data(), n);
    v.scale(-1.5, x2.data(), n);
    CHECK(x1 == x2);

    const double tol = 1e-12 * (1.0 + static_cast<double>(n) * 100.0);
    CHECK(std::fabs(s.dot(x.data(), y.data(), n) - v.dot(x.data(), y.data(), n)) <= tol);
    CHECK(std::fabs(s.l1_distance(x.data(), y.data(), n) - v.l1_distance(x.data(), y.data(), n)) <= tol);
    CHECK(s.max_abs(x.data(), n) == v.max_abs(x.data(), n));
  }
}

TEST_CASE("dispatch selection") {
  const auto before = simd::active();
  simd::select(simd::Isa::Scalar);
  CHECK(simd::active() == simd::Isa::Scalar);
  std::vector<double> x{1, -2, 3}, y{1, 1, 1};
  simd::axpy(2.0, x, y);
  CHECK(y == std::vector<double>{3, -3, 7});
  CHECK(simd::dot(x, x) == 14.0);
  CHECK(simd::l1_distance(x, y) == 7.0);
  CHECK(simd::max_abs(x) == 3.0);
  CHECK(simd::max_abs(std::span<const double>{}) == 0.0);
  if (simd::supported(before)) simd::select(before);
  CHECK(simd::name(simd::Isa::Avx2) == "avx2");
}
