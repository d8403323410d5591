#include <algorithm>
#include <cmath>
#include <limits>

#include "alab/error.hpp"
#include "alab/greens.hpp"

namespace alab {
namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double golden_max(const auto& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = f(d);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

cplx reciprocal_derivative(std::span<const cplx> u, int k) {
  if (k < 0 || static_cast<int>(u.size()) < k + 1) throw Error("dimension mismatch", "need u, u', ..., u^(k)");
  if (k == 0) return 1.0 / u[0];
  // Bell polynomials B[n][r] in x_i = u^(i)
  std::vector<std::vector<cplx>> B(static_cast<std::size_t>(k + 1), std::vector<cplx>(static_cast<std::size_t>(k + 1), 0.0));
  B[0][0] = 1.0;
  for (int n = 1; n <= k; ++n)
    for (int r = 1; r <= n; ++r) {
      cplx acc = 0.0;
      for (int i = 1; i <= n - r + 1; ++i)
        acc += binomial(n - 1, i - 1) * u[static_cast<std::size_t>(i)] *
               B[static_cast<std::size_t>(n - i)][static_cast<std::size_t>(r - 1)];
      B[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)] = acc;
    }
  // f(u) = 1/u: f^(r)(u) = (-1)^r r! / u^{r+1}
  const cplx inv = 1.0 / u[0];
  cplx power = inv;
  double fact = 1.0;
  cplx total = 0.0;
  for (int r = 1; r <= k; ++r) {
    power *= inv;
    fact *= r;
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    total += sign * fact * power * B[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)];
  }
  return total;
}

double derivative_bound(const Symbol& sym, cplx z, int order, const DecayOptions& options) {
  const int nu = sym.nu();
  std::vector<BandEdges> ranges;
  for (const auto& a : sym.axes()) ranges.push_back(axis_range(a));
  double best = 0.0;
  for (int j = 0; j < nu; ++j) {
    const AxisSymbol& axis = sym.axis(j);
    double cmin = 0.0, cmax = 0.0;
    for (int i = 0; i < nu; ++i) {
      if (i == j) continue;
      cmin += ranges[static_cast<std::size_t>(i)].lower;
      cmax += ranges[static_cast<std::size_t>(i)].upper;
    }
    const int shifts = (nu == 1 || cmax == cmin) ? 1 : std::max(2, options.shift_points);
    const int n = options.theta_points;
    std::vector<std::vector<double>> der;
    for (int i = 0; i <= order; ++i) der.push_back(axis.grid(n, i));
    std::vector<cplx> u(static_cast<std::size_t>(order + 1));
    auto eval_at = [&](double theta, double c) {
      for (int i = 0; i <= order; ++i) u[static_cast<std::size_t>(i)] = axis.derivative(theta, i);
      u[0] += c - z;
      return std::abs(reciprocal_derivative(u, order));
    };
    for (int sidx = 0; sidx < shifts; ++sidx) {
      const double c = shifts == 1 ? cmin : cmin + (cmax - cmin) * sidx / (shifts - 1);
      int kbest = 0;
      double vbest = -1.0;
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i <= order; ++i) u[static_cast<std::size_t>(i)] = der[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        u[0] += c - z;
        const double v = std::abs(reciprocal_derivative(u, order));
        if (v > vbest) {
          vbest = v;
          kbest = k;
        }
      }
      const double h = kTwoPi / n;
      const double refined = golden_max([&](double t) { return eval_at(t, c); }, (kbest - 1) * h, (kbest + 1) * h);
      best = std::max({best, vbest, refined});
    }
  }
  return best;
}

double lattice_zeta_tail(int nu, double p, int M) {
  if (!(p > nu)) throw Error("C(s) divergent", "exponent must exceed nu");
  if (M < 1) throw Error("invalid radius", "M must be positive");
  // shell r holds at most 2 nu (2r+1)^{nu-1} <= 2 nu ((2 + 1/M) r)^{nu-1} sites, each with |m| >= r
  const double Md = M;
  return 2.0 * nu * std::pow(2.0 + 1.0 / Md, nu - 1) * std::pow(nu, p) * std::pow(Md, nu - p) / (p - nu);
}

double lattice_zeta(int nu, double p) {
  if (!(p > nu)) throw Error("C(s) divergent", "exponent must exceed nu");
  const int M = nu == 1 ? 1 << 20 : (nu == 2 ? 2048 : 128);
  const double lognu = std::log(static_cast<double>(nu));
  double acc = 1.0;
  if (nu == 1) {
    for (int r = M; r >= 1; --r) acc += 2.0 * std::exp(-p * std::log(static_cast<double>(r)));
    return acc + lattice_zeta_tail(nu, p, M);
  }
  // direct sum over the cube |m|_inf <= M
  std::vector<int> m(static_cast<std::size_t>(nu), -M);
  const long long side = 2LL * M + 1;
  long long total = 1;
  for (int i = 0; i < nu; ++i) total *= side;
  double partial = 0.0;
  for (long long idx = 0; idx < total; ++idx) {
    long long r = idx;
    double r2 = 0.0;
    for (int i = 0; i < nu; ++i) {
      const double c = static_cast<double>(r % side - M);
      r /= side;
      r2 += c * c;
    }
    if (r2 > 0) partial += std::exp(p * (lognu - 0.5 * std::log(r2)));
  }
  return acc + partial + lattice_zeta_tail(nu, p, M);
}

DecayConstants decay_constants(const Symbol& sym, cplx z, double s, const DecayOptions& options) {
  const double dist = band_distance(sym, z);
  if (!(dist > 0)) throw Error("singular integrand", "z lies on the band");
  DecayConstants c;
  c.order = sym.smoothness_order();
  const double p = s * c.order;
  if (!(p > sym.nu())) throw Error("C(s) divergent", "need s > nu / (3 nu + 3)");
  c.derivative_sup = derivative_bound(sym, z, c.order, options);
  c.resolvent_sup = 1.0 / dist;
  c.C0 = std::max(c.derivative_sup, c.resolvent_sup);
  c.Cs = lattice_zeta(sym.nu(), p);
  return c;
}

FractionalSum fractional_sum(const Symbol& sym, cplx z, double s, int M, const DecayOptions& options) {
  if (!(s > 0 && s < 1)) throw Error("invalid exponent", "need 0 < s < 1");
  const int order = sym.smoothness_order();
  const double p = s * order;
  if (!(p > sym.nu())) throw Error("C(s) divergent", "need s > nu / (3 nu + 3)");
  const ResolventRow row = free_resolvent_row(sym, z, M);
  FractionalSum out;
  out.M = M;
  for (const cplx& g : row.values) out.partial += std::pow(std::abs(g), s);
  const double D = derivative_bound(sym, z, order, options);
  out.tail = D > 0 ? std::pow(D, s) * lattice_zeta_tail(sym.nu(), p, M) : 0.0;
  if (out.tail > out.partial) throw Error("increase M", "tail bound exceeds the partial sum");
  out.value = out.partial + out.tail;
  out.rigorous = true;
  return out;
}

FractionalSum fractional_sum_half(const Symbol& sym, cplx z, double s, int M, const DecayOptions& options) {
  std::vector<AxisSymbol> axes{AxisSymbol::cosine({2.0})};
  for (const auto& a : sym.axes()) axes.push_back(a);
  const Symbol bulk(std::move(axes));
  const FractionalSum floor = fractional_sum(bulk, z, s, M, options);

  const int nu = sym.nu();
  constexpr int kLayer = 3;
  const int Mrow = 2 * M + 2 * kLayer + 2;
  const ResolventRow row = free_resolvent_row(bulk, z, Mrow);
  const auto w = static_cast<std::size_t>(2 * M + 1);
  std::size_t transverse = 1;
  for (int i = 0; i < nu; ++i) transverse *= w;

  FractionalSum out = floor;
  std::vector<int> d(static_cast<std::size_t>(nu + 1));
  std::vector<int> e(static_cast<std::size_t>(nu + 1));
  for (int l1 = 0; l1 <= kLayer; ++l1) {
    double partial = 0.0;
    for (int b = std::max(0, l1 - M); b <= l1 + M; ++b) {
      for (std::size_t t = 0; t < transverse; ++t) {
        std::size_t r = t;
        for (int i = nu; i >= 1; --i) {
          const int y = static_cast<int>(r % w) - M;
          r /= w;
          d[static_cast<std::size_t>(i)] = -y;
          e[static_cast<std::size_t>(i)] = -y;
        }
        d[0] = l1 - b;
        e[0] = l1 + b + 2;
        partial += std::pow(std::abs(row.at(d) - row.at(e)), s);
      }
    }
    // |G_+| <= |G(.)| + |G(image)|, and (x + y)^s <= x^s + y^s
    const double tail = 2.0 * floor.tail;
    if (tail > partial) throw Error("increase M", "half-space tail bound exceeds the partial sum");
    if (partial + tail > out.value) {
      out.value = partial + tail;
      out.partial = partial;
      out.tail = tail;
    }
  }
  return out;
}

}  // namespace alab
