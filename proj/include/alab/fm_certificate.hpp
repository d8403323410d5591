#pragma once

// Constants of the fractional-moment decoupling inequality
//   int |x|^k |x - a|^-k dmu  <=  K_k  int |x - a|^-k dmu   (all real a)
// and the localization threshold built from them.

#include <limits>
#include <string>
#include <vector>

#include "alab/disorder.hpp"
#include "alab/envelope.hpp"
#include "alab/geometry.hpp"
#include "alab/symbol.hpp"

namespace alab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Moments {
  double B = 0.0;       // int |x|^tau dmu
  double Q = 0.0;       // int f^{1+q} dx (infinite q: not used, set to f_sup)
  double Q_root = 0.0;  // Q^{1/(1+q)}, or f_sup for q = inf
  double sigma2 = 0.0;  // int x^2 dmu
  double sigma1 = 0.0;  // int |x| dmu
  double f_sup = 0.0;
};

Moments measure_moments(const Disorder& dis, double tau, double q);

// [1 + 2/tau + 1/q]^{-1}; q may be kInf.
double kappa_bound(double tau, double q);

// C(Q, k, q) = 1 + k (2^q Q)^{1/(1+q)} / (q/(1+q) - k). For q = kInf pass
// f_sup as Q; the limit is 1 + 2 k f_sup / (1 - k). Throws "divergent" when
// k >= q/(1+q).
double c_constant(double Q, double kappa, double q);

// K_k = B^{k/t} (2^{1+2k} + 4) [B^{1-k/t} + B^{k/t} C(Q, k/(1-2k/t), q)^{(t-2k)/t}].
// Throws "inadmissible kappa" unless 0 <= k < kappa_bound(t, q).
double aizenman_constant(double B, double Q, double kappa, double tau, double q);

// For q = inf: the constant with C(Q, k', inf) replaced by the closed form
// 1 + 2 k Q / (1 - k) written for it in the source derivation, next to the
// value from the general formula, which simplifies to 1 + 2 k Q / (1 - 3 k) at tau = 1.
struct AizenmanVariants {
  double K_general = 0.0;
  double C_general = 0.0;
  double K_literal = 0.0;
  double C_literal = 0.0;
};
AizenmanVariants aizenman_variants(double B, double f_sup, double kappa, double tau);

struct DecouplingRow {
  double alpha = 0.0;
  double numerator = 0.0;    // int |x|^k |x - a|^-k dmu
  double denominator = 0.0;  // int |x - a|^-k dmu
  double ratio = 0.0;
};

struct DecouplingReport {
  std::vector<DecouplingRow> rows;
  double max_ratio = 0.0;
  double K_kappa = 0.0;
  bool pass = false;
};

// Ratios on alpha_grid, split at the density breakpoints, 0 and alpha, and
// integrated by double-exponential quadrature.
DecouplingReport verify_decoupling(const Disorder& dis, double kappa, const std::vector<double>& alpha_grid,
                                   double tau = 1.0, double q = kInf);

struct EnergyScan {
  double min = 0.0;  // magnitudes |E|
  double max = 0.0;
  double step = 1.0;
};

struct ThresholdRow {
  double E = 0.0;
  double S = 0.0;  // infinite when not resolvable
  double K_times_S = 0.0;
  bool certified = false;
  bool rigorous = false;
};

struct ThresholdReport {
  double s = 0.0;
  double kappa_max = 0.0;
  Moments moments;
  double K_s = 0.0;
  double K = 0.0;                 // sup a_n^s K_s
  double E0 = 0.0;                // max(|E_-|, |E_+|)
  std::vector<ThresholdRow> rows;
  bool found = false;
  double E_mu = 0.0;              // fractional-sum threshold
  double closed_form = 0.0;       // from K C0(E)^s C(s) < 1
  bool closed_form_found = false;
};

struct ThresholdOptions {
  double tau = 1.0;
  double q = kInf;
  int M = 64;
  int max_M = 4096;
};

// Throws VerdictNegative("no certificate in range") when the largest scanned
// |E| is not certified. geo selects the full lattice or the half space; only
// its kind is used.
ThresholdReport localization_threshold(const Symbol& sym, const Envelope& env, const Disorder& dis, double s,
                                       const EnergyScan& scan, const Geometry& geo,
                                       const ThresholdOptions& options = {});

}  // namespace alab
