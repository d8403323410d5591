#include "alab/dynamics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "alab/error.hpp"
#include "alab/parallel.hpp"
#include "alab/simd/kernels.hpp"

namespace alab {
namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double se = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - rss / syy : 1.0;
  f.se = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  return f;
}

// Radius below which the tail bound falls back to sup a_n.
double tail_at(const Envelope& env, double R) { return R >= 1.0 ? tail_function(env, R).g : env.sup(); }

std::vector<double> box_weights(const Geometry& geo, const auto& fn) {
  std::vector<double> w(geo.size());
  std::vector<int> n(static_cast<std::size_t>(geo.axes()));
  for (std::size_t i = 0; i < geo.size(); ++i) {
    geo.coords(i, n);
    w[i] = fn(n);
  }
  return w;
}

double trapezoid_step(double a, double b, double fa, double fb) { return 0.5 * (b - a) * (fa + fb); }

}  // namespace

double max_velocity(const Symbol& sym) {
  double v = 0.0;
  for (double d : derivative_sup(sym, 1)) v = std::max(v, d);
  return v;
}

std::vector<cvec> evolve_axes(const Symbol& sym, const WavePacket& packet, double s) {
  if (sym.nu() != packet.nu()) throw Error("dimension mismatch", "packet and symbol disagree on nu");
  const int n = packet.grid();
  const double L = n / 2;
  if (max_velocity(sym) * std::fabs(s) > L / 2)
    throw Error("box too small", "max velocity * s exceeds L / 2 for s = " + std::to_string(s));
  std::vector<cvec> out;
  for (int j = 0; j < sym.nu(); ++j) {
    const std::vector<double> h = sym.axis(j).grid(n, 0);
    cvec spec = packet.spectrum(j);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= std::polar(1.0, -s * h[k]);
    out.push_back(spectrum_to_lattice(spec));
  }
  return out;
}

cvec evolve(const Symbol& sym, const WavePacket& packet, double s) { return tensor_product(evolve_axes(sym, packet, s)); }

double interior_mass(std::span<const std::complex<double>> psi, double v, double s, const Geometry& geo) {
  if (psi.size() != geo.size()) throw Error("dimension mismatch", "vector length differs from box size");
  const double R = v * s / 4.0;
  std::vector<int> n(static_cast<std::size_t>(geo.axes()));
  double acc = 0.0;
  for (std::size_t i = 0; i < geo.size(); ++i) {
    geo.coords(i, n);
    bool inside = false;
    for (int c : n) inside = inside || std::abs(c) <= R;
    if (inside) acc += std::norm(psi[i]);
  }
  return std::sqrt(acc);
}

double interior_mass_factored(const std::vector<cvec>& axes, double v, double s) {
  const double R = v * s / 4.0;
  double log_out = 0.0;
  double scale = 1.0;
  for (const auto& a : axes) {
    const long half = static_cast<long>(a.size() / 2);
    double inside = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(static_cast<long>(i) - half) <= R) inside += std::norm(a[i]);
    const double total = simd::norm_sq(a);
    scale *= total;
    log_out += std::log1p(-std::min(1.0, inside / total));
  }
  return std::sqrt(scale * -std::expm1(log_out));
}

namespace {
void fit_propagation(PropagationReport& rep);
}  // namespace

PropagationReport propagation_exponent(const Symbol& sym, const WavePacket& packet, const std::vector<double>& s_grid) {
  if (s_grid.size() < 10) throw Error("too few points", "propagation fit needs at least 10 s values");
  for (double s : s_grid)
    if (!(s > 0)) throw Error("invalid time grid", "s must be positive");
  PropagationReport rep;
  rep.s = s_grid;
  rep.mass.resize(s_grid.size());
  parallel_for(s_grid.size(), [&](std::size_t i) {
    rep.mass[i] = interior_mass_factored(evolve_axes(sym, packet, s_grid[i]), packet.v_phi(), s_grid[i]);
  });
  fit_propagation(rep);
  return rep;
}

PropagationReport half_line_propagation(const WavePacket& odd_packet, const std::vector<double>& s_grid) {
  if (!odd_packet.is_odd()) throw Error("not odd", "half-line propagation needs an odd packet");
  if (s_grid.size() < 10) throw Error("too few points", "propagation fit needs at least 10 s values");
  for (double s : s_grid)
    if (!(s > 0)) throw Error("invalid time grid", "s must be positive");
  PropagationReport rep;
  rep.s = s_grid;
  rep.mass.resize(s_grid.size());
  parallel_for(s_grid.size(), [&](std::size_t i) { rep.mass[i] = half_line_mass(odd_packet, s_grid[i]); });
  fit_propagation(rep);
  return rep;
}

namespace {

void fit_propagation(PropagationReport& rep) {
  const auto& s_grid = rep.s;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    x.push_back(std::log(s_grid[i]));
    y.push_back(std::log(std::max(rep.mass[i], std::numeric_limits<double>::min())));
  }
  const LineFit f = fit_line(x, y);
  rep.slope = f.slope;
  rep.intercept = f.intercept;
  rep.r_squared = f.r2;
  const boost::math::students_t dist(static_cast<double>(x.size() - 2));
  double half_width = boost::math::quantile(dist, 0.975) * f.se;
  if (f.r2 < 0.9) {
    half_width *= 2.0;
    rep.verdict = "inconclusive";
  } else {
    rep.verdict = f.slope <= -1.7 ? "consistent with -2" : "not consistent with -2";
  }
  rep.ci_low = f.slope - half_width;
  rep.ci_high = f.slope + half_width;
}

}  // namespace

double disorder_sigma(const Disorder& dis) { return std::sqrt(dis.moment(2)); }

CookPoint cook_integrand(const Symbol& sym, const Envelope& env, const Disorder& dis, const WavePacket& packet,
                         double s) {
  const Geometry geo = packet.geometry();
  const auto a = box_weights(geo, [&](const std::vector<int>& n) { return env.value(n); });
  const auto axes = evolve_axes(sym, packet, s);
  const cvec psi = tensor_product(axes);
  const double sigma = disorder_sigma(dis);
  CookPoint p;
  p.s = s;
  p.integrand = sigma * std::sqrt(simd::weighted_norm_sq(psi, a));
  p.interior_mass = interior_mass_factored(axes, packet.v_phi(), s);
  p.bound_tail = sigma * tail_at(env, packet.v_phi() * s / 4.0) * std::sqrt(simd::norm_sq(packet.lattice()));
  p.bound_interior = sigma * env.sup() * p.interior_mass;
  return p;
}

CookReport cook_certificate(const Symbol& sym, const Envelope& env, const Disorder& dis, const WavePacket& packet,
                            const CookOptions& options) {
  const double T = options.horizon;
  if (!(T >= 8.0) || !(options.step > 0)) throw Error("horizon insufficient for fit", "need T >= 8");
  const int n1 = static_cast<int>(std::ceil((T - 1.0) / options.step));
  const int n2 = options.doubling ? static_cast<int>(std::ceil(T / options.step)) : 0;
  std::vector<double> s_grid;
  for (int i = 0; i <= n1; ++i) s_grid.push_back(1.0 + (T - 1.0) * i / n1);
  for (int i = 1; i <= n2; ++i) s_grid.push_back(T + T * i / n2);
  const double s_end = s_grid.back();
  const double L = packet.grid() / 2;
  if (max_velocity(sym) * s_end > L / 2) throw Error("box too small", "horizon needs a larger grid");

  const Geometry geo = packet.geometry();
  const auto a = box_weights(geo, [&](const std::vector<int>& n) { return env.value(n); });
  const int power = 2 * sym.nu() + 2;
  const auto w = box_weights(geo, [&](const std::vector<int>& n) {
    double r2 = 0.0;
    for (int c : n) r2 += static_cast<double>(c) * c;
    return std::pow(1.0 + std::sqrt(r2), power);
  });
  const double sigma = disorder_sigma(dis);
  const double phi_norm = std::sqrt(simd::norm_sq(packet.lattice()));

  CookReport rep;
  rep.points.resize(s_grid.size());
  parallel_for(s_grid.size(), [&](std::size_t i) {
    const double s = s_grid[i];
    const auto axes = evolve_axes(sym, packet, s);
    const cvec psi = tensor_product(axes);
    CookPoint& p = rep.points[i];
    p.s = s;
    p.integrand = sigma * std::sqrt(simd::weighted_norm_sq(psi, a));
    p.interior_mass = interior_mass_factored(axes, packet.v_phi(), s);
    p.bound_tail = sigma * tail_at(env, packet.v_phi() * s / 4.0) * phi_norm;
    p.bound_interior = sigma * env.sup() * p.interior_mass;
  });

  rep.cumulative.assign(s_grid.size(), 0.0);
  for (std::size_t i = 1; i < s_grid.size(); ++i)
    rep.cumulative[i] = rep.cumulative[i - 1] +
                        trapezoid_step(s_grid[i - 1], s_grid[i], rep.points[i - 1].integrand, rep.points[i].integrand);
  rep.integral_T = rep.cumulative[static_cast<std::size_t>(n1)];
  rep.integral_2T = rep.cumulative.back();
  rep.relative_change = rep.integral_2T > 0 ? (rep.integral_2T - rep.integral_T) / rep.integral_2T : 0.0;

  std::vector<double> x, y;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(n1); ++i) {
    const auto& p = rep.points[i];
    if (p.s >= T / 4 && p.integrand > 0) {
      x.push_back(std::log(p.s));
      y.push_back(std::log(p.integrand));
    }
  }
  bool all_zero = std::all_of(rep.points.begin(), rep.points.end(), [](const CookPoint& p) { return p.integrand == 0; });
  if (all_zero) {
    rep.tail_exponent = -std::numeric_limits<double>::infinity();
  } else {
    if (x.size() < 10) throw Error("horizon insufficient for fit", "fewer than 10 points in [T/4, T]");
    rep.tail_exponent = fit_line(x, y).slope;
  }
  rep.integrable = rep.tail_exponent < -1.0 && (!options.doubling || rep.relative_change < options.tolerance);
  rep.verdict = rep.integrable ? "integrable" : "not integrable";

  for (double s : {1.0, T / 4, T / 2, T, s_end}) {
    const cvec psi = evolve(sym, packet, s);
    rep.weighted_norms.emplace_back(s, std::sqrt(simd::weighted_norm_sq(psi, w)));
  }
  return rep;
}

double half_line_mass(const WavePacket& odd_packet, double s) {
  if (!odd_packet.is_odd()) throw Error("not odd", "half-line mass needs an odd packet");
  const auto axes = evolve_axes(Symbol::laplacian(1), odd_packet, s);
  const cvec& psi = axes.front();
  const double R = odd_packet.w_phi() * s / 4.0;
  const long half = static_cast<long>(psi.size() / 2);
  double acc = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (std::abs(static_cast<long>(i) - half) < R) acc += std::norm(psi[i]);
  return std::sqrt(acc);
}

cvec half_line_values(const cvec& odd_lattice, int count) {
  const std::size_t half = odd_lattice.size() / 2;
  cvec out;
  for (int n = 1; n <= count && half + static_cast<std::size_t>(n) < odd_lattice.size(); ++n)
    out.push_back(std::sqrt(2.0) * odd_lattice[half + static_cast<std::size_t>(n)]);
  return out;
}

}  // namespace alab
