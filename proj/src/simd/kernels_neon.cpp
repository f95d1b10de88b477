#include <arm_neon.h>

#include <cmath>

#include "bess/simd/kernels.hpp"

namespace bess::simd {

namespace {

// Two float64x2 registers per step give the same 4-lane grouping as AVX2.

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t p = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), p));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scale_neon(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
  for (; i < n; ++i) x[i] = x[i] * a;
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);  // lanes 0, 1
  float64x2_t hi = vdupq_n_f64(0.0);  // lanes 2, 3
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double sum = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(hi, 0)) +
               (vgetq_lane_f64(lo, 1) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) sum = sum + x[i] * y[i];
  return sum;
}

double max_abs_diff_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double out = std::fmax(vgetq_lane_f64(m, 0), vgetq_lane_f64(m, 1));
  for (; i < n; ++i) {
    const double d = std::fabs(x[i] - y[i]);
    if (d > out) out = d;
  }
  return out;
}

void diffuse_interior_neon(const double* in, double* out, std::size_t n, double source,
                           double coupling) {
  if (n < 3) return;
  const float64x2_t vs = vdupq_n_f64(source);
  const float64x2_t vc = vdupq_n_f64(coupling);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 1;
  for (; i + 2 <= n - 1; i += 2) {
    const float64x2_t left = vld1q_f64(in + i - 1);
    const float64x2_t mid = vld1q_f64(in + i);
    const float64x2_t right = vld1q_f64(in + i + 1);
    const float64x2_t lap = vsubq_f64(vaddq_f64(left, right), vmulq_f64(two, mid));
    vst1q_f64(out + i, vaddq_f64(mid, vaddq_f64(vs, vmulq_f64(vc, lap))));
  }
  for (; i + 1 < n; ++i)
    out[i] = in[i] + (source + coupling * ((in[i - 1] + in[i + 1]) - 2.0 * in[i]));
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{axpy_neon, scale_neon, dot_neon, max_abs_diff_neon,
                                 diffuse_interior_neon};
  return &table;
}

}  // namespace bess::simd
