#pragma once

// Data-parallel inner loops of the solver and the thermal plant.
//
// Every kernel has a scalar reference implementation and vector variants
// (AVX2 on x86-64, NEON on AArch64) selected once at runtime. The vector
// variants perform the same IEEE operations in the same order as the scalar
// reference (no FMA contraction, 4-lane partial sums in the reductions), so
// all variants are bit-identical and results do not depend on the host CPU.

#include <cstddef>
#include <span>
#include <string_view>

namespace bess::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  // y[i] = y[i] + a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] = x[i] * a
  void (*scale)(double a, double* x, std::size_t n);
  // sum x[i] * y[i] with four interleaved partial sums
  double (*dot)(const double* x, const double* y, std::size_t n);
  // max |x[i] - y[i]|
  double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
  // Interior of the explicit 1D heat update, i in [1, n-1):
  //   out[i] = in[i] + (source + coupling * ((in[i-1] + in[i+1]) - 2 in[i]))
  void (*diffuse_interior)(const double* in, double* out, std::size_t n, double source,
                           double coupling);
};

const KernelTable& scalar_kernels();
// nullptr when the variant is not compiled in or not supported by the CPU.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Best supported variant, unless overridden by BESS_SIMD=scalar|avx2|neon
/// in the environment or by force_isa().
Isa active_isa();
const KernelTable& kernels();

/// Test hook: pin the dispatch to `isa`. Returns false if unavailable.
bool force_isa(Isa isa);

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  kernels().axpy(a, x.data(), y.data(), y.size());
}
inline void scale(double a, std::span<double> x) { kernels().scale(a, x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) {
  return kernels().dot(x.data(), y.data(), x.size());
}
inline double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  return kernels().max_abs_diff(x.data(), y.data(), x.size());
}

}  // namespace bess::simd
