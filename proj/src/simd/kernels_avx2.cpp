#include <immintrin.h>

#include <cmath>

#include "bess/simd/kernels.hpp"

namespace bess::simd {

namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    const __m256d p0 = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d p1 = _mm256_mul_pd(va, _mm256_loadu_pd(x + i + 4));
    _mm256_storeu_pd(y + i, _mm256_add_pd(y0, p0));
    _mm256_storeu_pd(y + i + 4, _mm256_add_pd(y1, p1));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  for (; i < n; ++i) x[i] = x[i] * a;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
  for (; i < n; ++i) sum = sum + x[i] * y[i];
  return sum;
}

double max_abs_diff_avx2(const double* x, const double* y, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = 0.0;
  for (double v : lanes)
    if (v > out) out = v;
  for (; i < n; ++i) {
    const double d = std::fabs(x[i] - y[i]);
    if (d > out) out = d;
  }
  return out;
}

void diffuse_interior_avx2(const double* in, double* out, std::size_t n, double source,
                           double coupling) {
  if (n < 3) return;
  const __m256d vs = _mm256_set1_pd(source);
  const __m256d vc = _mm256_set1_pd(coupling);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d left = _mm256_loadu_pd(in + i - 1);
    const __m256d mid = _mm256_loadu_pd(in + i);
    const __m256d right = _mm256_loadu_pd(in + i + 1);
    const __m256d lap = _mm256_sub_pd(_mm256_add_pd(left, right), _mm256_mul_pd(two, mid));
    const __m256d delta = _mm256_add_pd(vs, _mm256_mul_pd(vc, lap));
    _mm256_storeu_pd(out + i, _mm256_add_pd(mid, delta));
  }
  for (; i + 1 < n; ++i)
    out[i] = in[i] + (source + coupling * ((in[i - 1] + in[i + 1]) - 2.0 * in[i]));
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{axpy_avx2, scale_avx2, dot_avx2, max_abs_diff_avx2,
                                 diffuse_interior_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
}

}  // namespace bess::simd
