#include "alab/symbol.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "alab/error.hpp"
#include "alab/fft.hpp"

namespace alab {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double cyclic_distance(double a, double b) {
  const double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

template <class F>
double bisect(F&& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Minimizes f on [a, b] by golden-section search; returns the argmin.
template <class F>
double golden_min(F&& f, double a, double b, int iterations = 100) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < iterations && (b - a) > 1e-15 * (1.0 + std::fabs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

int scan_size(const AxisSymbol& axis, const SymbolOptions& options) {
  int n = std::max(options.scan_points, 16 * (axis.degree() + 1));
  if (axis.is_tabulated()) n = std::max(n, axis.period_samples());
  return n;
}

// Level below which h' is indistinguishable from zero at this representation.
double derivative_floor(const AxisSymbol& axis) {
  const double scale = axis.derivative_scale(1);
  if (!axis.is_tabulated()) return 64.0 * kEps * scale;
  const auto& t = axis.table();
  double hmax = 0.0;
  for (double v : t) hmax = std::max(hmax, std::fabs(v));
  const double n = static_cast<double>(axis.period_samples());
  return std::max(64.0 * kEps * scale, kEps * hmax * std::pow(n, 1.5));
}

// One-sided estimate of the order-k derivative at an end of a sampled
// function, by least squares over a window of samples. offsets[i] is the
// distance of sample i from the end point, in grid steps.
double one_sided_derivative(const std::vector<double>& values, const std::vector<double>& offsets,
                            int order, double step, bool from_right) {
  const int degree = order + 6;
  const auto rows = static_cast<Eigen::Index>(values.size());
  const double width = offsets.back();
  Eigen::MatrixXd a(rows, degree + 1);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double t = offsets[static_cast<std::size_t>(i)] / width;
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
      a(i, c) = p;
      p *= t;
    }
    b(i) = values[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  double factorial = 1.0;
  for (int i = 2; i <= order; ++i) factorial *= i;
  double d = factorial * coef(order) / std::pow(width * step, order);
  if (from_right && (order % 2 == 1)) d = -d;
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// AxisSymbol

AxisSymbol AxisSymbol::cosine(std::vector<double> coeffs) {
  AxisSymbol s;
  s.cos_.assign(coeffs.size() + 1, 0.0);
  std::copy(coeffs.begin(), coeffs.end(), s.cos_.begin() + 1);
  s.sin_.assign(s.cos_.size(), 0.0);
  return s;
}

AxisSymbol AxisSymbol::tabulated(std::vector<double> table, int period_samples) {
  const auto n = static_cast<std::size_t>(period_samples);
  if (period_samples < 4) throw Error("insufficient smoothness data", "period_samples < 4");
  if (table.size() != n && table.size() != n + 1)
    throw Error("invalid symbol", "table length must be period_samples or period_samples + 1");
  AxisSymbol s;
  s.tabulated_ = true;
  s.table_closed_ = table.size() == n + 1;
  s.period_samples_ = period_samples;

  std::vector<std::complex<double>> spec(n);
  for (std::size_t i = 0; i < n; ++i) spec[i] = table[i];
  Fft fft({period_samples});
  fft.forward(spec);
  const std::size_t k_max = n / 2;
  s.cos_.assign(k_max + 1, 0.0);
  s.sin_.assign(k_max + 1, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  s.cos_[0] = spec[0].real() * inv_n;
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (2 * k == n) {
      s.cos_[k] = spec[k].real() * inv_n;
    } else {
      s.cos_[k] = 2.0 * spec[k].real() * inv_n;
      s.sin_[k] = -2.0 * spec[k].imag() * inv_n;
    }
  }
  s.table_ = std::move(table);
  return s;
}

bool AxisSymbol::has_sine_terms() const noexcept {
  return std::any_of(sin_.begin(), sin_.end(), [](double b) { return b != 0.0; });
}

bool AxisSymbol::is_zero() const noexcept {
  return std::all_of(cos_.begin(), cos_.end(), [](double a) { return a == 0.0; }) && !has_sine_terms();
}

double AxisSymbol::derivative(double theta, int order) const {
  // cos(x + r pi/2) and sin(x + r pi/2) in terms of cos x, sin x
  const int r = ((order % 4) + 4) % 4;
  double acc = order == 0 ? cos_[0] : 0.0;
  const std::complex<double> step = std::polar(1.0, theta);
  std::complex<double> z = step;
  const auto k_max = cos_.size() - 1;
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (k % 64 == 0) z = std::polar(1.0, static_cast<double>(k) * theta);
    const double c = z.real();
    const double s = z.imag();
    double cr = 0, sr = 0;
    switch (r) {
      case 0: cr = c; sr = s; break;
      case 1: cr = -s; sr = c; break;
      case 2: cr = -c; sr = -s; break;
      default: cr = s; sr = -c; break;
    }
    const double kp = std::pow(static_cast<double>(k), order);
    acc += kp * (cos_[k] * cr + sin_[k] * sr);
    z *= step;
  }
  return acc;
}

std::vector<double> AxisSymbol::grid(int n, int order) const {
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> out(nn);
  const std::size_t k_max = cos_.size() - 1;
  if (k_max <= 64 || nn < 2 * k_max + 1) {
    for (std::size_t i = 0; i < nn; ++i) out[i] = derivative(kTwoPi * static_cast<double>(i) / n, order);
    return out;
  }
  // c_k (i k)^order at frequency k, with c_k = (a_k - i b_k)/2 and c_{-k} = conj(c_k)
  std::vector<std::complex<double>> spec(nn, 0.0);
  const std::complex<double> iu(0.0, 1.0);
  if (order == 0) spec[0] = cos_[0];
  for (std::size_t k = 1; k <= k_max; ++k) {
    const std::complex<double> ck(0.5 * cos_[k], -0.5 * sin_[k]);
    const double kd = static_cast<double>(k);
    const std::complex<double> fp = std::pow(iu * kd, order);
    const std::complex<double> fm = std::pow(-iu * kd, order);
    spec[k] += ck * fp;
    spec[nn - k] += std::conj(ck) * fm;
  }
  Fft fft({n});
  fft.backward(spec);
  for (std::size_t i = 0; i < nn; ++i) out[i] = spec[i].real();
  return out;
}

std::complex<double> AxisSymbol::hopping(int d) const {
  const auto k = static_cast<std::size_t>(std::abs(d));
  if (k >= cos_.size()) return 0.0;
  if (d == 0) return cos_[0];
  const double sign = d > 0 ? -1.0 : 1.0;
  return {0.5 * cos_[k], sign * 0.5 * sin_[k]};
}

double AxisSymbol::derivative_scale(int order) const {
  double acc = order == 0 ? std::fabs(cos_[0]) : 0.0;
  for (std::size_t k = 1; k < cos_.size(); ++k)
    acc += std::pow(static_cast<double>(k), order) * (std::fabs(cos_[k]) + std::fabs(sin_[k]));
  return acc;
}

// ---------------------------------------------------------------------------
// Symbol

Symbol::Symbol(std::vector<AxisSymbol> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw Error("invalid symbol", "nu must be positive");
}

Symbol Symbol::laplacian(int nu) { return uniform_cosine(nu, {2.0}); }

Symbol Symbol::uniform_cosine(int nu, std::vector<double> coeffs) {
  if (nu < 1) throw Error("invalid symbol", "nu must be positive");
  return Symbol(std::vector<AxisSymbol>(static_cast<std::size_t>(nu), AxisSymbol::cosine(std::move(coeffs))));
}

double Symbol::value(std::span<const double> theta) const {
  if (theta.size() != axes_.size()) throw Error("dimension mismatch", "symbol argument");
  double acc = 0.0;
  for (std::size_t j = 0; j < axes_.size(); ++j) acc += axes_[j].value(theta[j]);
  return acc;
}

std::vector<double> CriticalSet::all() const {
  std::vector<double> out;
  for (const auto& a : per_axis) out.insert(out.end(), a.begin(), a.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
            out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Critical points

std::vector<double> axis_critical_points(const AxisSymbol& axis, const SymbolOptions& options) {
  const int n = scan_size(axis, options);
  const double floor = derivative_floor(axis);
  const std::vector<double> g = axis.grid(n, 1);
  auto dh = [&](double t) { return axis.derivative(t, 1); };
  auto theta_at = [n](long i) { return kTwoPi * static_cast<double>(i) / n; };
  auto at = [&](long i) { return g[static_cast<std::size_t>(((i % n) + n) % n)]; };
  auto cls = [&](long i) {
    const double v = at(i);
    return std::fabs(v) <= floor ? 0 : (v > 0 ? 1 : -1);
  };

  long start = -1;
  for (long i = 0; i < n; ++i) {
    if (cls(i) != 0) {
      start = i;
      break;
    }
  }
  if (start < 0) throw Error("critical set not finite at tolerance", "derivative vanishes identically");

  std::vector<double> roots;
  auto push = [&](double t) {
    roots.push_back(wrap_angle(t));
    if (static_cast<int>(roots.size()) > 4 * options.max_roots)
      throw Error("critical set not finite at tolerance");
  };

  long prev = start;
  for (long j = start + 1; j <= start + n; ++j) {
    const int cj = cls(j);
    if (cj == 0) continue;
    const int cp = cls(prev);
    const double a = theta_at(prev);
    const double b = theta_at(j);
    if (j - prev > 1) {
      if (cp != cj) {
        push(bisect(dh, a, b, dh(a)));
      } else {
        push(golden_min([&](double t) { return std::fabs(dh(t)); }, a, b));
      }
    } else if (cp != cj) {
      push(bisect(dh, a, b, dh(a)));
    } else if (j - 1 > start) {
      // interior grid minimum of |h'| with no sign change: possible double root
      const long i = j - 1;
      const double gi = std::fabs(at(i));
      if (gi < std::fabs(at(i - 1)) && gi <= std::fabs(at(j)) && gi < 1e-2 * axis.derivative_scale(1)) {
        const double t = golden_min([&](double x) { return std::fabs(dh(x)); }, theta_at(i - 1), b);
        if (std::fabs(dh(t)) <= floor) push(t);
      }
    }
    prev = j;
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() || cyclic_distance(r, unique.back()) > 1e-8) unique.push_back(r);
  }
  if (unique.size() > 1 && cyclic_distance(unique.front(), unique.back()) <= 1e-8) unique.pop_back();
  for (double& r : unique) {
    if (kTwoPi - r < 1e-12) r = 0.0;
  }
  std::sort(unique.begin(), unique.end());
  if (static_cast<int>(unique.size()) > options.max_roots) throw Error("critical set not finite at tolerance");
  return unique;
}

CriticalSet critical_set(const Symbol& sym, const SymbolOptions& options) {
  CriticalSet out;
  for (const auto& axis : sym.axes()) out.per_axis.push_back(axis_critical_points(axis, options));
  return out;
}

// ---------------------------------------------------------------------------
// Band edges and derivative sup-norms

BandEdges axis_range(const AxisSymbol& axis, const SymbolOptions& options) {
  if (axis.derivative_scale(1) == 0.0) return {axis.constant(), axis.constant()};
  const int n = scan_size(axis, options);
  const std::vector<double> v = axis.grid(n, 0);
  BandEdges e{*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())};
  try {
    for (double c : axis_critical_points(axis, options)) {
      const double hv = axis.value(c);
      e.lower = std::min(e.lower, hv);
      e.upper = std::max(e.upper, hv);
    }
  } catch (const Error&) {
    // degenerate critical structure: fall back to the refined grid extrema
    const auto imin = std::min_element(v.begin(), v.end()) - v.begin();
    const auto imax = std::max_element(v.begin(), v.end()) - v.begin();
    const double h = kTwoPi / n;
    const double tmin = golden_min([&](double t) { return axis.value(t); }, (imin - 1) * h, (imin + 1) * h);
    const double tmax = golden_min([&](double t) { return -axis.value(t); }, (imax - 1) * h, (imax + 1) * h);
    e.lower = std::min(e.lower, axis.value(tmin));
    e.upper = std::max(e.upper, axis.value(tmax));
  }
  return e;
}

BandEdges band_edges(const Symbol& sym, const SymbolOptions& options) {
  BandEdges e;
  for (const auto& axis : sym.axes()) {
    const BandEdges a = axis_range(axis, options);
    e.lower += a.lower;
    e.upper += a.upper;
  }
  return e;
}

double axis_derivative_sup(const AxisSymbol& axis, int order, const SymbolOptions& options) {
  if (axis.derivative_scale(order) == 0.0) return 0.0;
  const int n = scan_size(axis, options);
  const std::vector<double> v = axis.grid(n, order);
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t keep = std::min<std::size_t>(16, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) { return std::fabs(v[a]) > std::fabs(v[b]); });
  double best = std::fabs(v[idx[0]]);
  const double h = kTwoPi / n;
  for (std::size_t c = 0; c < keep; ++c) {
    const double t0 = static_cast<double>(idx[c]) * h;
    const double t = golden_min([&](double x) { return -std::fabs(axis.derivative(x, order)); }, t0 - h, t0 + h);
    best = std::max(best, std::fabs(axis.derivative(t, order)));
  }
  return best;
}

std::vector<double> derivative_sup(const Symbol& sym, int order, const SymbolOptions& options) {
  std::vector<double> out;
  for (const auto& axis : sym.axes()) out.push_back(axis_derivative_sup(axis, order, options));
  return out;
}

// ---------------------------------------------------------------------------
// Minimal velocity

double minimal_velocity(const Symbol& sym, std::span<const Interval> supports, const SymbolOptions& options) {
  if (static_cast<int>(supports.size()) != sym.nu()) throw Error("dimension mismatch", "one support per axis");
  double v = std::numeric_limits<double>::infinity();
  for (int j = 0; j < sym.nu(); ++j) {
    const Interval& iv = supports[static_cast<std::size_t>(j)];
    if (!(iv.hi > iv.lo) || iv.width() >= kTwoPi) throw Error("invalid support", "need lo < hi, width < 2 pi");
    const AxisSymbol& axis = sym.axis(j);
    for (double c : axis_critical_points(axis, options)) {
      // distance from c to the interval, modulo 2 pi
      const double off = wrap_angle(c - iv.lo);
      const double dist = off <= iv.width() ? 0.0 : std::min(off - iv.width(), kTwoPi - off);
      if (dist < options.support_margin) throw Error("zero minimal velocity");
    }
    auto speed = [&](double t) { return std::fabs(axis.derivative(t, 1)); };
    constexpr int kPoints = 2048;
    const double h = iv.width() / kPoints;
    int imin = 0;
    double vmin = speed(iv.lo);
    for (int i = 1; i <= kPoints; ++i) {
      const double s = speed(iv.lo + i * h);
      if (s < vmin) {
        vmin = s;
        imin = i;
      }
    }
    const double a = iv.lo + std::max(0, imin - 1) * h;
    const double b = iv.lo + std::min(kPoints, imin + 1) * h;
    vmin = std::min({vmin, speed(golden_min(speed, a, b)), speed(iv.lo), speed(iv.hi)});
    v = std::min(v, vmin);
  }
  if (!(v > 0.0)) throw Error("zero minimal velocity");
  return v;
}

// ---------------------------------------------------------------------------
// Hypothesis validation

bool HypothesisReport::passed() const {
  return separable && std::all_of(axes.begin(), axes.end(), [](const AxisHypotheses& a) {
           return a.critical_finite && a.derivative_periodic;
         });
}

HypothesisReport validate_hypotheses(const Symbol& sym, const SymbolOptions& options) {
  HypothesisReport report;
  const int max_order = sym.smoothness_order();
  constexpr double kPeriodicTol = 1e-6;
  for (const auto& axis : sym.axes()) {
    AxisHypotheses ah;
    try {
      ah.root_count = static_cast<int>(axis_critical_points(axis, options).size());
      ah.critical_finite = true;
    } catch (const Error& e) {
      ah.critical_finite = false;
      ah.note = e.what();
    }

    if (axis.is_tabulated()) {
      const int n = axis.period_samples();
      const int window = 3 * (max_order + 7);
      if (n < kMinTabulatedSamples || n < 4 * window)
        throw Error("insufficient smoothness data",
                    "tabulated axis needs at least " + std::to_string(kMinTabulatedSamples) + " samples");
      const auto& t = axis.table();
      const double step = kTwoPi / n;
      std::vector<double> left_v, left_o, right_v, right_o;
      for (int i = 0; i < window; ++i) {
        left_v.push_back(t[static_cast<std::size_t>(i)]);
        left_o.push_back(i);
      }
      const int first = axis.table_closed() ? 0 : 1;
      for (int i = first; i < window + first; ++i) {
        right_v.push_back(t[static_cast<std::size_t>(n - i)]);
        right_o.push_back(i);
      }
      // one-sided fits need a nonzero right end offset for scaling
      left_o.back() = window - 1;
      for (int k = 0; k <= max_order; ++k) {
        const double d0 = one_sided_derivative(left_v, left_o, k, step, false);
        const double d1 = one_sided_derivative(right_v, right_o, k, step, true);
        const double scale = std::max(1.0, axis_derivative_sup(axis, k, options));
        ah.worst_mismatch = std::max(ah.worst_mismatch, std::fabs(d0 - d1) / scale);
      }
    } else {
      for (int k = 0; k <= max_order; ++k) {
        const double d0 = axis.derivative(0.0, k);
        const double d1 = axis.derivative(kTwoPi, k);
        const double scale = std::max(1.0, axis.derivative_scale(k));
        ah.worst_mismatch = std::max(ah.worst_mismatch, std::fabs(d0 - d1) / scale);
      }
    }
    ah.orders_checked = max_order + 1;
    ah.derivative_periodic = ah.worst_mismatch <= kPeriodicTol;
    report.axes.push_back(std::move(ah));
  }
  return report;
}

}  // namespace alab
