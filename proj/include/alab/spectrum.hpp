#pragma once

// Finite-volume spectra of H0 + V and per-eigenvector localization proxies.

#include <complex>
#include <span>
#include <vector>

#include "alab/free_operator.hpp"
#include "alab/geometry.hpp"
#include "alab/symbol.hpp"

namespace alab {

struct SpectrumOptions {
  bool vectors = true;
  std::size_t dense_limit = 4096;  // larger boxes use the windowed iterative path
  double window_center = 0.0;      // iterative path: eigenvalues nearest this energy
  int window_count = 32;
};

struct SpectralDiagnostics {
  std::vector<double> eigenvalues;                      // ascending
  std::vector<std::vector<std::complex<double>>> vectors;  // normalized, same order
  std::vector<double> ipr;
  std::vector<double> xi;
  bool dense = true;
};

// Eigenpairs of the assembled operator on geo with the given diagonal
// potential. Dense for geo.size() <= dense_limit, else shift-invert subspace
// iteration around window_center.
SpectralDiagnostics truncated_spectrum(const Symbol& sym, const Geometry& geo, std::span<const double> potential,
                                       const SpectrumOptions& options = {});

struct IprDecay {
  double ipr = 0.0;
  double xi = 0.0;  // 0 for a single site, +inf when the envelope does not decay
};

// IPR = sum |psi|^4 / (sum |psi|^2)^2; xi from a least-squares fit of the
// binned log envelope against distance from the maximum.
IprDecay ipr_and_decay(std::span<const std::complex<double>> psi, const Geometry& geo);

struct SpacingRatio {
  double mean = 0.0;
  double ci_half_width = 0.0;
  std::size_t levels = 0;
};

// <r> over levels in [lo, hi]; throws "too few levels" below 50.
SpacingRatio spacing_ratio(std::span<const double> eigenvalues, double lo, double hi);

struct KrylovOverlap {
  int dim_n = 0;  // dimension reached by span{H^k delta_n}, smaller on breakdown
  int dim_m = 0;
  std::vector<double> cosines;  // principal angles between the two subspaces, descending
};

// Krylov subspaces of delta_n and delta_m under H, up to the given dimension.
// Zero cosines mean the cyclic subspaces are orthogonal.
KrylovOverlap krylov_overlap(const SparseC& H, std::size_t n, std::size_t m, int dim);

}  // namespace alab
