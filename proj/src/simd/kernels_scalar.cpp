#include "alab/simd/kernels.hpp"

namespace alab::simd {
namespace {

double sum_sq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double sum_abs4_scalar(const double* z, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1];
    acc += p * p;
  }
  return acc;
}

double weighted_sum_sq_scalar(const double* z, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1];
    acc += w[i] * w[i] * p;
  }
  return acc;
}

std::complex<double> resolvent_sum_scalar(const double* h, const double* wre, const double* wim,
                                          std::size_t n, double e, double eta) {
  // 1/(h - e - i eta) = (h - e + i eta) / ((h - e)^2 + eta^2)
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = h[i] - e;
    const double inv = 1.0 / (d * d + eta * eta);
    const double gr = d * inv;
    const double gi = eta * inv;
    re += wre[i] * gr - wim[i] * gi;
    im += wre[i] * gi + wim[i] * gr;
  }
  return {re, im};
}

void caxpy_scalar(std::complex<double> a, const double* x, double* y, std::size_t n) {
  const double ar = a.real();
  const double ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[2 * i];
    const double xi = x[2 * i + 1];
    y[2 * i] += ar * xr - ai * xi;
    y[2 * i + 1] += ar * xi + ai * xr;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",           sum_sq_scalar,        sum_abs4_scalar,
                                 weighted_sum_sq_scalar, resolvent_sum_scalar, caxpy_scalar};
  return table;
}

}  // namespace alab::simd
