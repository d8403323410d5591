#pragma once

// Data-parallel inner loops shared by the lattice, dynamics and resolvent code.
//
// Every kernel has a scalar reference implementation; an AVX2/FMA variant is
// compiled when the toolchain supports it and selected at runtime when the CPU
// does. Setting ALAB_SIMD=scalar in the environment forces the reference path.
// Complex arrays are passed as interleaved (re, im) doubles.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace alab::simd {

struct KernelTable {
  std::string_view name;

  // sum_i x_i^2
  double (*sum_sq)(const double* x, std::size_t n);

  // sum_i |z_i|^4 over n complex values
  double (*sum_abs4)(const double* z, std::size_t n);

  // sum_i w_i^2 |z_i|^2 over n complex values
  double (*weighted_sum_sq)(const double* z, const double* w, std::size_t n);

  // sum_i (wre_i + i wim_i) / (h_i - (e + i eta))
  std::complex<double> (*resolvent_sum)(const double* h, const double* wre, const double* wim,
                                        std::size_t n, double e, double eta);

  // y_i += a * x_i over n complex values, a complex
  void (*caxpy)(std::complex<double> a, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// The table used by library code.
const KernelTable& kernels();

// Convenience wrappers over kernels().
inline double norm_sq(std::span<const std::complex<double>> z) {
  return kernels().sum_sq(reinterpret_cast<const double*>(z.data()), 2 * z.size());
}

inline double sum_abs4(std::span<const std::complex<double>> z) {
  return kernels().sum_abs4(reinterpret_cast<const double*>(z.data()), z.size());
}

inline double weighted_norm_sq(std::span<const std::complex<double>> z, std::span<const double> w) {
  return kernels().weighted_sum_sq(reinterpret_cast<const double*>(z.data()), w.data(), z.size());
}

}  // namespace alab::simd
