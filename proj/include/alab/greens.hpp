#pragma once

// Free resolvent kernels G(0, z, n, m) = <delta_n, (H0 - z)^{-1} delta_m>, their
// decay constants, fractional sums, random Green's functions on finite boxes,
// and rank-one eigenvalues of H0 + lambda P0.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "alab/disorder.hpp"
#include "alab/envelope.hpp"
#include "alab/free_operator.hpp"
#include "alab/geometry.hpp"
#include "alab/symbol.hpp"

namespace alab {

using cplx = std::complex<double>;

// Distance from z to the band [E_-, E_+] in the complex plane.
double band_distance(const Symbol& sym, cplx z);

struct QuadratureOptions {
  double rel_tol = 1e-10;
  std::size_t max_points = std::size_t{1} << 24;  // total points of the product grid
};

// Periodic product-grid trapezoid in nu dimensions, doubled until successive
// values agree to rel_tol. Throws "singular integrand" for Im z = 0 with Re z
// in the band, and "no convergence" when max_points is reached.
cplx free_resolvent_kernel(const Symbol& sym, cplx z, std::span<const int> n, std::span<const int> m,
                           const QuadratureOptions& options = {});

// G(0, z, 0, d) for all |d|_inf <= M from one inverse FFT of 1/(h - z),
// refined by doubling the grid. Values are row-major over d in [-M, M]^nu.
struct ResolventRow {
  int nu = 1;
  int M = 0;
  int grid = 0;
  std::vector<cplx> values;
  cplx at(std::span<const int> d) const;
};
ResolventRow free_resolvent_row(const Symbol& sym, cplx z, int M, const QuadratureOptions& options = {});

struct DecayConstants {
  int order = 0;           // 3 nu + 3
  double derivative_sup = 0.0;  // D = sup_j sup |d_j^order (h - z)^{-1}|
  double resolvent_sup = 0.0;   // sup |(h - z)^{-1}|
  double C0 = 0.0;              // max of the two
  double Cs = 0.0;              // 1 + sum_{m != 0} (nu / |m|)^{s order}
};

// d^k/dtheta^k of 1 / (u(theta)) by Faa di Bruno, given u, u', ..., u^(k).
cplx reciprocal_derivative(std::span<const cplx> u_derivs, int k);

struct DecayOptions {
  int theta_points = 2048;
  int shift_points = 33;  // grid over the other axes' range for nu > 1
};

// Requires z off the band and s > nu / (3 nu + 3) (else "C(s) divergent").
DecayConstants decay_constants(const Symbol& sym, cplx z, double s, const DecayOptions& options = {});
double derivative_bound(const Symbol& sym, cplx z, int order, const DecayOptions& options = {});
// 1 + sum_{m in Z^nu, m != 0} (nu / |m|)^p, p > nu.
double lattice_zeta(int nu, double p);
// sum over |m|_inf > M of (nu / |m|)^p, an upper bound via an integral tail.
double lattice_zeta_tail(int nu, double p, int M);

struct FractionalSum {
  double value = 0.0;    // partial + tail
  double partial = 0.0;  // sum over |m|_inf <= M
  double tail = 0.0;     // D^s sum_{|m|_inf > M} (nu/|m|)^{s(3 nu + 3)}
  bool rigorous = false; // tail computed from the derivative bound
  int M = 0;
};

// sup_l sum_m |G(0, z, l, m)|^s on the full lattice (the sup is attained at
// l = 0 by translation invariance). Throws "increase M" when the tail exceeds
// the partial sum.
FractionalSum fractional_sum(const Symbol& sym, cplx z, double s, int M, const DecayOptions& options = {});

// Half-space variant: bulk symbol 2 cos theta_0 + h on Z^{nu+1}, images
// G_+((a,x),(b,y)) = G(a-b, x-y) - G(a+b+2, x-y), sup over l_1 in {0..3}
// with the bulk value as a floor.
FractionalSum fractional_sum_half(const Symbol& sym, cplx z, double s, int M, const DecayOptions& options = {});

// Sparse LU of H - z for repeated solves.
class GreenSolver {
 public:
  GreenSolver(const SparseC& H, cplx z);
  // (H - z)^{-1} delta_m
  std::vector<cplx> column(std::size_t m) const;
  cplx element(std::size_t n, std::size_t m) const { return column(m)[n]; }
  // |(H - z) x - delta_m| for the computed column
  double residual(std::size_t m) const;
  cplx z() const noexcept { return z_; }

 private:
  SparseC A_;
  cplx z_;
  mutable Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>> lu_;  // solve() caches workspace
};

cplx random_green(const SparseC& H, cplx z, std::size_t n, std::size_t m);

struct RankOneCheck {
  cplx direct;
  cplx reconstructed;
  double relative_error = 0.0;
  bool ill_conditioned = false;  // |G_l(l,l)| tiny
};

// H = H_l + V(l) P_l; compares the rank-one reconstruction of G(n, l) with a
// direct solve.
RankOneCheck rank_one_check(const SparseC& H, std::span<const double> potential, std::size_t l, cplx z,
                            std::size_t n);

struct SimonWolffResult {
  std::vector<double> eta;
  std::vector<double> sum;  // sum_m |G(E + i eta, n, m)|^2
  double slope = 0.0;       // d log sum / d log eta over the last three
  std::string verdict;      // "bounded", "divergent-like", "undetermined"
};

SimonWolffResult simon_wolff_sum(const SparseC& H, std::size_t n, double E, const std::vector<double>& etas);
SimonWolffResult simon_wolff_sum(const Symbol& sym, const Envelope& env, const Disorder& dis, const Geometry& geo,
                                 std::uint64_t seed, std::span<const int> n, double E,
                                 const std::vector<double>& etas);

struct AKEigenvalue {
  bool found = false;
  double E = 0.0;
  double residual = 0.0;  // |G00(E) + 1/lambda|
  std::string note;
};

// Root of G(0, E, 0, 0) = -1/lambda outside the band: above it for lambda > 0,
// below for lambda < 0. "none" (found = false) when no root is resolved above
// the floor 1e-10 (E_+ - E_- + 1) from the band edge.
AKEigenvalue aronszajn_krein_eigenvalue(const Symbol& sym, double lambda);

}  // namespace alab
