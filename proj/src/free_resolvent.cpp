#include <algorithm>
#include <cmath>
#include <limits>

#include "alab/error.hpp"
#include "alab/fft.hpp"
#include "alab/greens.hpp"
#include "alab/simd/kernels.hpp"

namespace alab {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void check_z(const Symbol& sym, cplx z) {
  if (z.imag() < 0) throw Error("invalid energy", "Im z must be non-negative");
  if (z.imag() == 0) {
    const BandEdges e = band_edges(sym);
    if (z.real() >= e.lower && z.real() <= e.upper) throw Error("singular integrand", "E inside the band with eta = 0");
  }
}

bool constant_symbol(const Symbol& sym) {
  return std::all_of(sym.axes().begin(), sym.axes().end(),
                     [](const AxisSymbol& a) { return a.derivative_scale(1) == 0.0; });
}

double constant_value(const Symbol& sym) {
  double c = 0.0;
  for (const auto& a : sym.axes()) c += a.constant();
  return c;
}

// exp(i d theta_k) on the N-point grid, with the phase reduced exactly.
std::vector<cplx> phase_row(int d, std::size_t N) {
  std::vector<cplx> out(N);
  const auto n = static_cast<long long>(N);
  for (std::size_t k = 0; k < N; ++k) {
    const long long r = ((static_cast<long long>(d) * static_cast<long long>(k)) % n + n) % n;
    out[k] = std::polar(1.0, kTwoPi * static_cast<double>(r) / static_cast<double>(N));
  }
  return out;
}

// Trapezoid value of int dsigma exp(i d.theta) / (h - z) on an N^nu grid.
cplx trapezoid(const Symbol& sym, cplx z, std::span<const int> d, std::size_t N) {
  const int nu = sym.nu();
  const auto& k = simd::kernels();
  std::vector<std::vector<double>> h;
  std::vector<std::vector<cplx>> ph;
  for (int j = 0; j < nu; ++j) {
    h.push_back(sym.axis(j).grid(static_cast<int>(N), 0));
    ph.push_back(phase_row(d[static_cast<std::size_t>(j)], N));
  }
  // inner product grid over axes 1..nu-1 (or axis 0 alone when nu == 1)
  const int first_inner = nu == 1 ? 0 : 1;
  std::vector<double> hi{0.0};
  std::vector<cplx> wi{1.0};
  for (int j = first_inner; j < nu; ++j) {
    std::vector<double> hn(hi.size() * N);
    std::vector<cplx> wn(hi.size() * N);
    for (std::size_t a = 0; a < hi.size(); ++a)
      for (std::size_t b = 0; b < N; ++b) {
        hn[a * N + b] = hi[a] + h[static_cast<std::size_t>(j)][b];
        wn[a * N + b] = wi[a] * ph[static_cast<std::size_t>(j)][b];
      }
    hi = std::move(hn);
    wi = std::move(wn);
  }
  std::vector<double> wre(wi.size()), wim(wi.size());
  for (std::size_t i = 0; i < wi.size(); ++i) {
    wre[i] = wi[i].real();
    wim[i] = wi[i].imag();
  }
  cplx total = 0.0;
  if (nu == 1) {
    total = k.resolvent_sum(hi.data(), wre.data(), wim.data(), hi.size(), z.real(), z.imag());
  } else {
    for (std::size_t a = 0; a < N; ++a) {
      const cplx part = k.resolvent_sum(hi.data(), wre.data(), wim.data(), hi.size(), z.real() - h[0][a], z.imag());
      total += ph[0][a] * part;
    }
  }
  return total / static_cast<double>(ipow(N, nu));
}

}  // namespace

double band_distance(const Symbol& sym, cplx z) {
  const BandEdges e = band_edges(sym);
  const double x = z.real();
  const double dx = x < e.lower ? e.lower - x : (x > e.upper ? x - e.upper : 0.0);
  return std::hypot(dx, z.imag());
}

cplx free_resolvent_kernel(const Symbol& sym, cplx z, std::span<const int> n, std::span<const int> m,
                           const QuadratureOptions& options) {
  const int nu = sym.nu();
  if (static_cast<int>(n.size()) != nu || static_cast<int>(m.size()) != nu)
    throw Error("dimension mismatch", "sites must have nu coordinates");
  check_z(sym, z);
  std::vector<int> d(static_cast<std::size_t>(nu));
  int dmax = 0;
  for (int j = 0; j < nu; ++j) {
    d[static_cast<std::size_t>(j)] = n[static_cast<std::size_t>(j)] - m[static_cast<std::size_t>(j)];
    dmax = std::max(dmax, std::abs(d[static_cast<std::size_t>(j)]));
  }
  int degree = 0;
  for (const auto& a : sym.axes()) degree = std::max(degree, a.degree());
  const double floor = 64.0 * kEps / band_distance(sym, z);
  std::size_t N = next_pow2(std::max<std::size_t>(16, 4 * static_cast<std::size_t>(dmax + degree) + 8));
  cplx prev = trapezoid(sym, z, d, N);
  for (;;) {
    N *= 2;
    if (ipow(N, nu) > options.max_points) throw Error("no convergence", "quadrature grid limit reached");
    const cplx cur = trapezoid(sym, z, d, N);
    if (std::abs(cur - prev) <= options.rel_tol * std::abs(cur) + floor) return cur;
    prev = cur;
  }
}

cplx ResolventRow::at(std::span<const int> d) const {
  std::size_t idx = 0;
  const auto w = static_cast<std::size_t>(2 * M + 1);
  for (int j = 0; j < nu; ++j) {
    const int c = d[static_cast<std::size_t>(j)];
    if (std::abs(c) > M) throw Error("dimension mismatch", "offset outside the row");
    idx = idx * w + static_cast<std::size_t>(c + M);
  }
  return values[idx];
}

ResolventRow free_resolvent_row(const Symbol& sym, cplx z, int M, const QuadratureOptions& options) {
  if (M < 0) throw Error("invalid radius", "M must be non-negative");
  check_z(sym, z);
  const int nu = sym.nu();
  ResolventRow row;
  row.nu = nu;
  row.M = M;
  const auto w = static_cast<std::size_t>(2 * M + 1);
  const std::size_t count = ipow(w, nu);
  row.values.assign(count, 0.0);
  if (constant_symbol(sym)) {
    row.values[(count - 1) / 2] = 1.0 / (constant_value(sym) - z);
    return row;
  }
  const double floor = 64.0 * kEps / band_distance(sym, z);
  auto compute = [&](std::size_t N) {
    std::vector<std::vector<double>> h;
    for (int j = 0; j < nu; ++j) h.push_back(sym.axis(j).grid(static_cast<int>(N), 0));
    const std::size_t total = ipow(N, nu);
    std::vector<cplx> data(total);
    std::vector<std::size_t> k(static_cast<std::size_t>(nu), 0);
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t r = i;
      double hv = 0.0;
      for (int j = nu - 1; j >= 0; --j) {
        hv += h[static_cast<std::size_t>(j)][r % N];
        r /= N;
      }
      data[i] = 1.0 / (hv - z);
    }
    Fft fft(std::vector<int>(static_cast<std::size_t>(nu), static_cast<int>(N)));
    fft.backward(data);
    std::vector<cplx> out(count);
    const double inv = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t r = i;
      std::size_t pos = 0;
      std::size_t mult = 1;
      for (int j = nu - 1; j >= 0; --j) {
        const long c = static_cast<long>(r % w) - M;
        r /= w;
        pos += static_cast<std::size_t>((c + static_cast<long>(N)) % static_cast<long>(N)) * mult;
        mult *= N;
      }
      out[i] = data[pos] * inv;
    }
    return out;
  };
  int degree = 0;
  for (const auto& a : sym.axes()) degree = std::max(degree, a.degree());
  std::size_t N = next_pow2(std::max<std::size_t>(64, 4 * static_cast<std::size_t>(M + degree) + 8));
  std::vector<cplx> prev = compute(N);
  for (;;) {
    N *= 2;
    if (ipow(N, nu) > options.max_points) throw Error("no convergence", "row grid limit reached");
    std::vector<cplx> cur = compute(N);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      diff = std::max(diff, std::abs(cur[i] - prev[i]));
      scale = std::max(scale, std::abs(cur[i]));
    }
    if (diff <= options.rel_tol * scale + floor) {
      row.values = std::move(cur);
      row.grid = static_cast<int>(N);
      return row;
    }
    prev = std::move(cur);
  }
}

AKEigenvalue aronszajn_krein_eigenvalue(const Symbol& sym, double lambda) {
  if (lambda == 0.0 || !std::isfinite(lambda)) throw Error("invalid coupling", "lambda must be nonzero");
  const BandEdges edges = band_edges(sym);
  const double sign = lambda > 0 ? 1.0 : -1.0;
  const double edge = lambda > 0 ? edges.upper : edges.lower;
  const double t_floor = 1e-10 * (edges.upper - edges.lower + 1.0);
  const std::vector<int> origin(static_cast<std::size_t>(sym.nu()), 0);
  // q(t) = sign (G00(edge + sign t) + 1/lambda): >= 0 at t = |lambda|,
  // negative near the edge iff a root exists
  auto qfun = [&](double t, double tol) {
    QuadratureOptions q;
    q.rel_tol = tol;
    const double E = edge + sign * t;
    return sign * (free_resolvent_kernel(sym, cplx(E, 0.0), origin, origin, q).real() + 1.0 / lambda);
  };
  // tight tolerance where the grid allows it; very close to the edge roundoff
  // in the trapezoid sum caps the attainable accuracy
  auto qbest = [&](double t) {
    try {
      return qfun(t, 1e-13);
    } catch (const Error& e) {
      if (e.reason() != "no convergence") throw;
      return qfun(t, 1e-9);
    }
  };
  AKEigenvalue out;
  double hi = std::fabs(lambda);
  const double qhi = qbest(hi);
  if (qhi == 0.0) {
    out.found = true;
    out.E = edge + sign * hi;
    return out;
  }
  double lo = hi;
  double qlo = qhi;
  while (qlo >= 0.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < t_floor) {
      out.note = "none";
      return out;
    }
    try {
      qlo = qbest(lo);
    } catch (const Error& e) {
      if (e.reason() != "no convergence") throw;
      out.note = "none: kernel not resolvable within " + std::to_string(lo) + " of the band edge";
      return out;
    }
  }
  for (int it = 0; it < 200 && (hi - lo) > 4 * kEps * (std::fabs(edge) + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (qbest(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  out.found = true;
  out.E = edge + sign * t;
  out.residual = std::fabs(qbest(t));
  return out;
}

}  // namespace alab
