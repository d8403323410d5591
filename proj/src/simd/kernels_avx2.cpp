#include <immintrin.h>

#include "alab/simd/kernels.hpp"

namespace alab::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// |z|^2 for two complex numbers packed as (re0, im0, re1, im1); the result
// lanes are (p0, p0, p1, p1).
inline __m256d abs2_pairs(__m256d z) {
  const __m256d sq = _mm256_mul_pd(z, z);
  return _mm256_add_pd(sq, _mm256_permute_pd(sq, 0b0101));
}

double sum_sq_avx2(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(x + i);
    const __m256d v1 = _mm256_loadu_pd(x + i + 4);
    a0 = _mm256_fmadd_pd(v0, v0, a0);
    a1 = _mm256_fmadd_pd(v1, v1, a1);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double sum_abs4_avx2(const double* z, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d p = abs2_pairs(_mm256_loadu_pd(z + 2 * i));
    acc = _mm256_fmadd_pd(p, p, acc);
  }
  // each |z|^4 was accumulated twice (duplicated lanes)
  double total = 0.5 * hsum(acc);
  for (; i < n; ++i) {
    const double p = z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1];
    total += p * p;
  }
  return total;
}

double weighted_sum_sq_avx2(const double* z, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(z + 2 * i);
    // (w0, w0, w1, w1)
    const __m128d w2 = _mm_loadu_pd(w + i);
    const __m256d ww = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0b01010000);
    const __m256d wv = _mm256_mul_pd(ww, v);
    acc = _mm256_fmadd_pd(wv, wv, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double p = z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1];
    total += w[i] * w[i] * p;
  }
  return total;
}

std::complex<double> resolvent_sum_avx2(const double* h, const double* wre, const double* wim,
                                        std::size_t n, double e, double eta) {
  const __m256d ve = _mm256_set1_pd(e);
  const __m256d veta = _mm256_set1_pd(eta);
  const __m256d eta2 = _mm256_mul_pd(veta, veta);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d are = _mm256_setzero_pd();
  __m256d aim = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(h + i), ve);
    const __m256d inv = _mm256_div_pd(one, _mm256_fmadd_pd(d, d, eta2));
    const __m256d gr = _mm256_mul_pd(d, inv);
    const __m256d gi = _mm256_mul_pd(veta, inv);
    const __m256d xr = _mm256_loadu_pd(wre + i);
    const __m256d xi = _mm256_loadu_pd(wim + i);
    are = _mm256_fmadd_pd(xr, gr, are);
    are = _mm256_fnmadd_pd(xi, gi, are);
    aim = _mm256_fmadd_pd(xr, gi, aim);
    aim = _mm256_fmadd_pd(xi, gr, aim);
  }
  double re = hsum(are);
  double im = hsum(aim);
  for (; i < n; ++i) {
    const double d = h[i] - e;
    const double inv = 1.0 / (d * d + eta * eta);
    re += wre[i] * d * inv - wim[i] * eta * inv;
    im += wre[i] * eta * inv + wim[i] * d * inv;
  }
  return {re, im};
}

void caxpy_avx2(std::complex<double> a, const double* x, double* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(a.real());
  // (-ai, ai, -ai, ai) multiplies the swapped (im, re) pairs
  const __m256d ai = _mm256_set_pd(a.imag(), -a.imag(), a.imag(), -a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(x + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0b0101);
    __m256d yv = _mm256_loadu_pd(y + 2 * i);
    yv = _mm256_fmadd_pd(ar, xv, yv);
    yv = _mm256_fmadd_pd(ai, xs, yv);
    _mm256_storeu_pd(y + 2 * i, yv);
  }
  for (; i < n; ++i) {
    const double xr = x[2 * i];
    const double xi = x[2 * i + 1];
    y[2 * i] += a.real() * xr - a.imag() * xi;
    y[2 * i + 1] += a.real() * xi + a.imag() * xr;
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2",           sum_sq_avx2,        sum_abs4_avx2,
                                 weighted_sum_sq_avx2, resolvent_sum_avx2, caxpy_avx2};
  return table;
}

}  // namespace alab::simd
