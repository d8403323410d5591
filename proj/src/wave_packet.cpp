#include "alab/wave_packet.hpp"

#include <cmath>
#include <numbers>

#include "alab/error.hpp"
#include "alab/fft.hpp"

namespace alab {
namespace {

double wrap(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0 ? t + kTwoPi : t;
}

// Position of theta inside [lo, hi] read modulo 2 pi, or -1 when outside.
double interval_offset(const Interval& iv, double theta) {
  const double off = wrap(theta - iv.lo);
  return off <= iv.width() ? off : -1.0;
}

double bump_on(const Interval& iv, double theta) {
  const double off = interval_offset(iv, theta);
  if (off < 0) return 0.0;
  return smooth_bump(2.0 * off / iv.width() - 1.0);
}

void check_grid(int grid) {
  if (grid < 8 || grid % 2 != 0) throw Error("invalid packet", "grid must be even and at least 8");
}

void check_vanishing(const cvec& spectrum, const std::vector<Interval>& supports) {
  const int n = static_cast<int>(spectrum.size());
  for (int k = 0; k < n; ++k) {
    const double theta = kTwoPi * k / n;
    bool inside = false;
    for (const auto& iv : supports) inside = inside || interval_offset(iv, theta) >= 0;
    if (!inside && std::abs(spectrum[static_cast<std::size_t>(k)]) >= 1e-12)
      throw Error("invalid packet", "spectrum does not vanish off its declared support");
  }
}

}  // namespace

double smooth_bump(double x) {
  if (!(std::fabs(x) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

void WavePacket::normalize(cvec& spectrum) {
  double s = 0.0;
  for (const auto& c : spectrum) s += std::norm(c);
  s /= static_cast<double>(spectrum.size());
  if (!(s > 0)) throw Error("invalid packet", "zero spectrum");
  const double inv = 1.0 / std::sqrt(s);
  for (auto& c : spectrum) c *= inv;
}

WavePacket WavePacket::from_spectra(const Symbol& sym, std::vector<cvec> spectra, std::vector<Interval> supports,
                                    const SymbolOptions& options) {
  if (static_cast<int>(spectra.size()) != sym.nu() || supports.size() != spectra.size())
    throw Error("dimension mismatch", "one spectrum and support per axis");
  WavePacket p;
  p.grid_ = static_cast<int>(spectra.front().size());
  check_grid(p.grid_);
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    if (static_cast<int>(spectra[j].size()) != p.grid_) throw Error("dimension mismatch", "spectra differ in length");
    check_vanishing(spectra[j], {supports[j]});
    normalize(spectra[j]);
  }
  p.v_phi_ = minimal_velocity(sym, supports, options);
  p.spectra_ = std::move(spectra);
  p.supports_ = std::move(supports);
  return p;
}

WavePacket WavePacket::bump(const Symbol& sym, std::vector<Interval> supports, int grid, const SymbolOptions& options) {
  check_grid(grid);
  if (static_cast<int>(supports.size()) != sym.nu()) throw Error("dimension mismatch", "one support per axis");
  std::vector<cvec> spectra;
  for (const auto& iv : supports) {
    cvec s(static_cast<std::size_t>(grid));
    for (int k = 0; k < grid; ++k) s[static_cast<std::size_t>(k)] = bump_on(iv, kTwoPi * k / grid);
    spectra.push_back(std::move(s));
  }
  return from_spectra(sym, std::move(spectra), std::move(supports), options);
}

WavePacket WavePacket::odd_from_spectrum(cvec spectrum, Interval support) {
  const int n = static_cast<int>(spectrum.size());
  check_grid(n);
  if (!(support.lo > 0 && support.hi < std::numbers::pi && support.hi > support.lo))
    throw Error("zero minimal velocity", "odd packet support must lie inside (0, pi)");
  const Interval mirror{kTwoPi - support.hi, kTwoPi - support.lo};
  check_vanishing(spectrum, {support, mirror});
  double even = 0.0;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto a = spectrum[static_cast<std::size_t>(k)];
    const auto b = spectrum[static_cast<std::size_t>((n - k) % n)];
    even += std::norm(a + b);
    total += std::norm(a);
  }
  if (std::sqrt(even) > 1e-12 * std::max(1.0, std::sqrt(total)))
    throw Error("not odd", "phi_hat(theta) = -phi_hat(-theta) violated");
  WavePacket p;
  p.grid_ = n;
  p.odd_ = true;
  normalize(spectrum);
  p.spectra_ = {std::move(spectrum)};
  p.supports_ = {support};
  const Interval sup[] = {support};
  p.w_phi_ = minimal_velocity(Symbol::laplacian(1), sup);
  p.v_phi_ = p.w_phi_;
  return p;
}

WavePacket WavePacket::odd_bump(Interval support, int grid) {
  check_grid(grid);
  if (!(support.lo > 0 && support.hi < std::numbers::pi && support.hi > support.lo))
    throw Error("zero minimal velocity", "odd packet support must lie inside (0, pi)");
  cvec s(static_cast<std::size_t>(grid));
  for (int k = 0; k < grid; ++k) {
    const double theta = kTwoPi * k / grid;
    s[static_cast<std::size_t>(k)] = bump_on(support, theta) - bump_on(support, kTwoPi - theta);
  }
  return odd_from_spectrum(std::move(s), support);
}

Geometry WavePacket::geometry() const { return Geometry(GeometryKind::full, nu(), grid_ / 2, Boundary::periodic); }

cvec spectrum_to_lattice(const cvec& spectrum) {
  const int n = static_cast<int>(spectrum.size());
  cvec x = spectrum;
  Fft fft({n});
  fft.backward(x);
  // position p = n mod N; box index i = n + N/2
  cvec out(x.size());
  const std::size_t half = x.size() / 2;
  const double inv = 1.0 / n;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[(i + half) % x.size()] * inv;
  return out;
}

cvec tensor_product(const std::vector<cvec>& factors) {
  cvec out{1.0};
  for (const auto& f : factors) {
    cvec next(out.size() * f.size());
    for (std::size_t a = 0; a < out.size(); ++a)
      for (std::size_t b = 0; b < f.size(); ++b) next[a * f.size() + b] = out[a] * f[b];
    out = std::move(next);
  }
  return out;
}

cvec WavePacket::axis_lattice(int j) const { return spectrum_to_lattice(spectrum(j)); }

cvec WavePacket::lattice() const {
  std::vector<cvec> f;
  for (int j = 0; j < nu(); ++j) f.push_back(axis_lattice(j));
  return tensor_product(f);
}

}  // namespace alab
