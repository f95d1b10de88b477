#include <cmath>

#include "bess/simd/kernels.hpp"

namespace bess::simd {

namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] * a;
}

// Lane structure mirrors the 4-wide vector kernels so that reductions match bit for bit.
double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (std::size_t l = 0; l < 4; ++l) acc[l] = acc[l] + x[i + l] * y[i + l];
  double sum = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) sum = sum + x[i] * y[i];
  return sum;
}

double max_abs_diff_scalar(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(x[i] - y[i]);
    if (d > m) m = d;
  }
  return m;
}

void diffuse_interior_scalar(const double* in, double* out, std::size_t n, double source,
                             double coupling) {
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = in[i] + (source + coupling * ((in[i - 1] + in[i + 1]) - 2.0 * in[i]));
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{axpy_scalar, scale_scalar, dot_scalar, max_abs_diff_scalar,
                                 diffuse_interior_scalar};
  return table;
}

}  // namespace bess::simd
