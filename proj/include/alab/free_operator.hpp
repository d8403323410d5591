#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "alab/geometry.hpp"
#include "alab/potential.hpp"
#include "alab/symbol.hpp"

namespace alab {

using cvec = std::vector<std::complex<double>>;
using SparseC = Eigen::SparseMatrix<std::complex<double>, Eigen::ColMajor>;
using SparseR = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Hoppings t_d of an axis kept after truncation at 1e-14 relative, as (d, t_d).
std::vector<std::pair<int, std::complex<double>>> axis_hoppings(const AxisSymbol& axis);

// H0 psi on the box (H0+ for half geometries). Periodic boxes multiply by h in
// discrete Fourier space; Dirichlet boxes convolve with the truncated kernel.
cvec apply_free(const Symbol& sym, const Geometry& geo, std::span<const std::complex<double>> psi);

// H0 + V as an explicit sparse matrix. Throws "box too large" when the
// estimated storage exceeds max_bytes.
SparseC assemble_sparse(const Symbol& sym, const Geometry& geo, std::span<const double> potential,
                        double max_bytes = 2.0e9);
SparseC assemble_sparse(const Symbol& sym, const Geometry& geo, const PotentialField& V,
                        double max_bytes = 2.0e9);

// Real version for cosine symbols; throws "complex hoppings" otherwise.
SparseR assemble_sparse_real(const Symbol& sym, const Geometry& geo, std::span<const double> potential,
                             double max_bytes = 2.0e9);

}  // namespace alab
