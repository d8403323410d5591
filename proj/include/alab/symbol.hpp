#pragma once

// Separable torus symbols h(theta) = sum_j h_j(theta_j) defining the free
// operator H0, and the scalar quantities derived from them: band edges,
// critical sets, minimal velocities and derivative sup-norms.

#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace alab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// One axis of a separable symbol, stored as a real trigonometric polynomial
//   h(theta) = a_0 + sum_{k=1..K} (a_k cos k theta + b_k sin k theta).
// Cosine symbols are exact; tabulated symbols are spectrally interpolated from
// their samples, and keep the raw table for the boundary-derivative check.
class AxisSymbol {
 public:
  // h(theta) = sum_k coeffs[k-1] cos(k theta)
  static AxisSymbol cosine(std::vector<double> coeffs);

  // Samples at theta_i = 2 pi i / period_samples. The table holds either
  // period_samples values, or period_samples + 1 with the last one at 2 pi.
  static AxisSymbol tabulated(std::vector<double> table, int period_samples);

  bool is_tabulated() const noexcept { return tabulated_; }
  int degree() const noexcept { return static_cast<int>(cos_.size()) - 1; }
  double constant() const noexcept { return cos_[0]; }
  // a_k and b_k, index k = 0..degree()
  std::span<const double> cos_coeffs() const noexcept { return cos_; }
  std::span<const double> sin_coeffs() const noexcept { return sin_; }
  bool has_sine_terms() const noexcept;
  bool is_zero() const noexcept;

  // h^(order)(theta); order 0 is the value.
  double derivative(double theta, int order) const;
  double value(double theta) const { return derivative(theta, 0); }

  // h^(order) on the uniform grid theta_i = 2 pi i / n.
  std::vector<double> grid(int n, int order) const;

  // Lattice kernel t_d with h(theta) = sum_d t_d exp(i d theta), so that
  // (H0 u)(n) = sum_d t_d u(n + d).
  std::complex<double> hopping(int d) const;

  // sum_k k |coefficient|: a bound for sup |h'| and the root-floor scale.
  double derivative_scale(int order) const;

  const std::vector<double>& table() const noexcept { return table_; }
  bool table_closed() const noexcept { return table_closed_; }
  int period_samples() const noexcept { return period_samples_; }

 private:
  std::vector<double> cos_{0.0};
  std::vector<double> sin_{0.0};
  bool tabulated_ = false;
  std::vector<double> table_;
  bool table_closed_ = false;
  int period_samples_ = 0;
};

class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::vector<AxisSymbol> axes);

  // nu copies of 2 cos(theta): the lattice Laplacian.
  static Symbol laplacian(int nu);
  // The same cosine polynomial on each of nu axes.
  static Symbol uniform_cosine(int nu, std::vector<double> coeffs);

  int nu() const noexcept { return static_cast<int>(axes_.size()); }
  const AxisSymbol& axis(int j) const { return axes_.at(static_cast<std::size_t>(j)); }
  const std::vector<AxisSymbol>& axes() const noexcept { return axes_; }

  // 3 nu + 3, the smoothness order the resolvent decay estimate uses.
  int smoothness_order() const noexcept { return 3 * nu() + 3; }

  double value(std::span<const double> theta) const;

 private:
  std::vector<AxisSymbol> axes_;
};

struct SymbolOptions {
  int scan_points = 10000;
  double root_tol = 1e-10;
  int max_roots = 256;
  double support_margin = 1e-3;
};

// Closed angular interval [lo, hi] (radians, read modulo 2 pi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
};

struct CriticalSet {
  std::vector<std::vector<double>> per_axis;  // sorted, in [0, 2 pi)
  std::vector<double> all() const;            // sorted union
};

// Zeros of h_j' per axis. Throws "critical set not finite at tolerance" when the
// root count exceeds options.max_roots or h_j' vanishes identically.
std::vector<double> axis_critical_points(const AxisSymbol& axis, const SymbolOptions& options = {});
CriticalSet critical_set(const Symbol& sym, const SymbolOptions& options = {});

struct BandEdges {
  double lower = 0.0;  // E_-
  double upper = 0.0;  // E_+
};

BandEdges axis_range(const AxisSymbol& axis, const SymbolOptions& options = {});
BandEdges band_edges(const Symbol& sym, const SymbolOptions& options = {});

// sup over theta of |h_j^(order)|, one entry per axis.
double axis_derivative_sup(const AxisSymbol& axis, int order, const SymbolOptions& options = {});
std::vector<double> derivative_sup(const Symbol& sym, int order, const SymbolOptions& options = {});

// v = min_j min_{theta in supports[j]} |h_j'(theta)|. Throws "zero minimal
// velocity" when a support comes within options.support_margin of a critical
// angle.
double minimal_velocity(const Symbol& sym, std::span<const Interval> supports,
                        const SymbolOptions& options = {});

struct AxisHypotheses {
  bool critical_finite = false;
  int root_count = 0;
  bool derivative_periodic = false;
  int orders_checked = 0;
  double worst_mismatch = 0.0;  // max_k |h^(k)(0) - h^(k)(2 pi)| / max(1, sup|h^(k)|)
  std::string note;
};

struct HypothesisReport {
  bool separable = true;
  std::vector<AxisHypotheses> axes;
  bool passed() const;
};

// Throws "insufficient smoothness data" for tabulated axes too short to
// estimate boundary derivatives up to order 3 nu + 3.
HypothesisReport validate_hypotheses(const Symbol& sym, const SymbolOptions& options = {});

// Smallest table accepted by validate_hypotheses for a tabulated axis.
inline constexpr int kMinTabulatedSamples = 1 << 14;

}  // namespace alab
