#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ctxlab/simd.hpp"

namespace ctxlab::simd {

namespace {

bool cpu_has_avx2() {
#if defined(CTXLAB_HAVE_AVX2_KERNELS) && (defined(__x86_64__) || defined(__i386__)) && \
    (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("CTXLAB_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

const detail::KernelTable& table() {
#if defined(CTXLAB_HAVE_AVX2_KERNELS)
  if (current().load(std::memory_order_relaxed) == Isa::Avx2) return detail::avx2_kernels();
#endif
  return detail::scalar_kernels();
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("simd kernel: operand lengths differ");
}

}  // namespace

std::string_view name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool supported(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active() { return current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (!supported(isa)) throw std::runtime_error("instruction set not supported: " + std::string(name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  table().axpy(a, x.data(), y.data(), x.size());
}

void scale(double a, std::span<double> x) { table().scale(a, x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size());
  return table().dot(x.data(), y.data(), x.size());
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size());
  return table().l1_distance(x.data(), y.data(), x.size());
}

double max_abs(std::span<const double> x) { return table().max_abs(x.data(), x.size()); }

#if !defined(CTXLAB_HAVE_AVX2_KERNELS)
namespace detail {
const KernelTable& avx2_kernels() { return scalar_kernels(); }
}  // namespace detail
#endif

}  // namespace ctxlab::simd
