#pragma once

// Double-precision kernels used by the floating-point simplex and the
// relative-entropy solver. Each kernel has a scalar reference version and an
// AVX2 version; the dispatcher picks one at first use from the CPU features
// (override with CTXLAB_SIMD=scalar).

#include <cstddef>
#include <span>
#include <string_view>

namespace ctxlab::simd {

enum class Isa { Scalar, Avx2 };

std::string_view name(Isa isa);

bool supported(Isa isa);

/// The instruction set currently used by the dispatching entry points.
Isa active();

/// Selects the kernels explicitly; throws std::runtime_error if unsupported.
void select(Isa isa);

// y += a * x. Bit-identical across instruction sets (no fused multiply-add).
void axpy(double a, std::span<const double> x, std::span<double> y);

// x *= a
void scale(double a, std::span<double> x);

// sum_n x[n] * y[n]; summation order differs between instruction sets.
double dot(std::span<const double> x, std::span<const double> y);

// sum_n |x[n] - y[n]|
double l1_distance(std::span<const double> x, std::span<const double> y);

// max_n |x[n]|, 0 for empty input
double max_abs(std::span<const double> x);

namespace detail {

struct KernelTable {
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*l1_distance)(const double*, const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
};

const KernelTable& scalar_kernels();
const KernelTable& avx2_kernels();  // only valid when supported(Isa::Avx2)

}  // namespace detail

}  // namespace ctxlab::simd
