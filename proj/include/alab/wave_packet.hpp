#pragma once

// Wave packets phi with Fourier transform supported away from the critical set.
//
// Conventions: phi(n) = int dsigma(theta) exp(i n theta) phi_hat(theta) with
// dsigma = dtheta / 2 pi, sampled on theta_k = 2 pi k / N. The lattice box is
// the periodic full box with L = N / 2. Multi-axis packets are tensor products
// of one-axis packets, each normalized in l^2.

#include <complex>
#include <vector>

#include "alab/geometry.hpp"
#include "alab/symbol.hpp"

namespace alab {

using cvec = std::vector<std::complex<double>>;

// exp(-1 / (1 - x^2)) on (-1, 1), zero elsewhere.
double smooth_bump(double x);

class WavePacket {
 public:
  // Tensor product of smooth bumps, one per axis on supports[j].
  static WavePacket bump(const Symbol& sym, std::vector<Interval> supports, int grid,
                         const SymbolOptions& options = {});
  // Per-axis spectra sampled on the grid; must vanish (< 1e-12) off the supports.
  static WavePacket from_spectra(const Symbol& sym, std::vector<cvec> spectra, std::vector<Interval> supports,
                                 const SymbolOptions& options = {});

  // One-axis odd packet phi_hat(theta) = b(theta) - b(-theta) with b a bump on
  // support, 0 < lo < hi < pi. Carries w = inf |2 sin theta| over the support.
  static WavePacket odd_bump(Interval support, int grid);
  // Throws "not odd" unless phi_hat(theta) = -phi_hat(-theta) within 1e-12.
  static WavePacket odd_from_spectrum(cvec spectrum, Interval support);

  int nu() const noexcept { return static_cast<int>(spectra_.size()); }
  int grid() const noexcept { return grid_; }
  const cvec& spectrum(int j) const { return spectra_.at(static_cast<std::size_t>(j)); }
  const std::vector<Interval>& supports() const noexcept { return supports_; }
  bool is_odd() const noexcept { return odd_; }
  double v_phi() const noexcept { return v_phi_; }
  double w_phi() const noexcept { return w_phi_; }

  Geometry geometry() const;
  // Axis factor phi_j(n) in box order (index i <-> n = i - N/2).
  cvec axis_lattice(int j) const;
  // Full tensor product on geometry().
  cvec lattice() const;

 private:
  static void normalize(cvec& spectrum);

  int grid_ = 0;
  std::vector<cvec> spectra_;
  std::vector<Interval> supports_;
  bool odd_ = false;
  double v_phi_ = 0.0;
  double w_phi_ = 0.0;
};

// Box-ordered lattice values of (1/N) sum_k spectrum_k exp(i n theta_k).
cvec spectrum_to_lattice(const cvec& spectrum);

// Tensor product of per-axis box-ordered vectors (first axis slowest).
cvec tensor_product(const std::vector<cvec>& factors);

}  // namespace alab
