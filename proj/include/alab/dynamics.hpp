#pragma once

// Free evolution exp(-i s H0) of wave packets by exact symbol calculus on a
// periodic box, ballistic-exclusion masses, and the Cook integrand.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "alab/disorder.hpp"
#include "alab/envelope.hpp"
#include "alab/wave_packet.hpp"

namespace alab {

// max_j sup |h_j'|: the fastest group velocity.
double max_velocity(const Symbol& sym);

// Per-axis factors of exp(-i s H0) phi, box-ordered. Throws "box too small"
// unless max_velocity * |s| <= L / 2.
std::vector<cvec> evolve_axes(const Symbol& sym, const WavePacket& packet, double s);
// Full lattice vector on packet.geometry().
cvec evolve(const Symbol& sym, const WavePacket& packet, double s);

// l^2 mass of psi on { n : |n_j| <= v s / 4 for some j }.
double interior_mass(std::span<const std::complex<double>> psi, double v, double s, const Geometry& geo);
// Same quantity from the per-axis factors of a normalized product state.
double interior_mass_factored(const std::vector<cvec>& axes, double v, double s);

struct PropagationReport {
  std::vector<double> s;
  std::vector<double> mass;
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double r_squared = 0.0;
  std::string verdict;  // "consistent with -2", "not consistent with -2", "inconclusive"
};

// Least-squares slope of log m(s) against log s with a 95% interval. Needs at
// least 10 positive grid points.
PropagationReport propagation_exponent(const Symbol& sym, const WavePacket& packet, const std::vector<double>& s_grid);
// Same fit for the half-line mass of an odd packet under Delta_+.
PropagationReport half_line_propagation(const WavePacket& odd_packet, const std::vector<double>& s_grid);

struct CookPoint {
  double s = 0.0;
  double integrand = 0.0;       // sigma |A psi(s)|
  double bound_tail = 0.0;      // sigma g(v s / 4) |phi|
  double bound_interior = 0.0;  // sigma |A| m(s)
  double interior_mass = 0.0;
};

// sigma = sqrt(int x^2 dmu).
double disorder_sigma(const Disorder& dis);

CookPoint cook_integrand(const Symbol& sym, const Envelope& env, const Disorder& dis, const WavePacket& packet,
                         double s);

struct CookOptions {
  double horizon = 160.0;
  double step = 0.25;
  double tolerance = 1e-2;  // relative change of the integral when T doubles
  bool doubling = true;
};

struct CookReport {
  std::vector<CookPoint> points;        // s in [1, 2T] when doubling, else [1, T]
  std::vector<double> cumulative;       // int_1^s c
  double integral_T = 0.0;
  double integral_2T = 0.0;
  double relative_change = 0.0;
  double tail_exponent = 0.0;           // log-log slope of c over [T/4, T]
  std::vector<std::pair<double, double>> weighted_norms;  // (s, |(1+|m|)^{2 nu + 2} psi(s)|)
  bool integrable = false;
  std::string verdict;                  // "integrable" or "not integrable"
};

CookReport cook_certificate(const Symbol& sym, const Envelope& env, const Disorder& dis, const WavePacket& packet,
                            const CookOptions& options = {});

// |F(|n| < w s / 4) exp(-i s Delta_+) phi_1| for an odd packet, computed on the
// odd extension to Z with symbol 2 cos theta.
double half_line_mass(const WavePacket& odd_packet, double s);

// Half-line packet values phi_1(n) = sqrt(2) phi(n) for n = 1..count.
cvec half_line_values(const cvec& odd_lattice, int count);

}  // namespace alab
