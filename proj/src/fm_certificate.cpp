#include "alab/fm_certificate.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>

#include "alab/error.hpp"
#include "alab/parallel.hpp"

namespace alab {
namespace {

// Pieces of the density support split at the extra points.
std::vector<std::pair<double, double>> split_support(const Disorder& dis, std::vector<double> cuts) {
  std::vector<double> pts = dis.breakpoints();
  const double lo = pts.front();
  const double hi = pts.back();
  for (double c : cuts)
    if (c > lo && c < hi) pts.push_back(c);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) out.emplace_back(pts[i], pts[i + 1]);
  return out;
}

// Integrates f(x) g(x, da, db) over [a, b], where da = x - a and db = b - x
// are computed without cancellation near the ends.
template <class G>
double integrate_piece(const Disorder& dis, double a, double b, G&& g) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  // density at the midpoint decides which linear piece applies
  const double mid = 0.5 * (a + b);
  const double fa = dis.density(std::nextafter(a, mid));
  const double fb = dis.density(std::nextafter(b, mid));
  auto f = [&](double x, double xc) {
    const double da = xc <= 0 ? -xc : x - a;
    const double db = xc > 0 ? xc : b - x;
    const double dens = fa + (fb - fa) * (da / (b - a));
    return dens * g(x, da, db);
  };
  return integrator.integrate(f, a, b, 1e-12);
}

double quad_moment(const Disorder& dis, const auto& weight) {
  double acc = 0.0;
  for (const auto& [a, b] : split_support(dis, {0.0})) {
    acc += integrate_piece(dis, a, b, [&](double x, double da, double db) {
      // |x| is exactly the distance to an endpoint when that endpoint is 0
      const double ax = a == 0.0 ? da : (b == 0.0 ? db : std::fabs(x));
      return weight(x, ax);
    });
  }
  return acc;
}

}  // namespace

Moments measure_moments(const Disorder& dis, double tau, double q) {
  if (!(tau > 0)) throw Error("invalid moment", "tau must be positive");
  if (!(q > 0)) throw Error("invalid moment", "q must be positive");
  Moments m;
  m.B = quad_moment(dis, [&](double, double ax) { return std::pow(ax, tau); });
  m.sigma2 = quad_moment(dis, [](double x, double) { return x * x; });
  m.sigma1 = quad_moment(dis, [](double, double ax) { return ax; });
  m.f_sup = dis.f_sup();
  if (std::isinf(q)) {
    m.Q = m.f_sup;
    m.Q_root = m.f_sup;
  } else {
    double Q = 0.0;
    for (const auto& [a, b] : split_support(dis, {})) {
      Q += integrate_piece(dis, a, b, [&](double x, double, double) { return std::pow(dis.density(x), q); });
    }
    if (!std::isfinite(Q)) throw Error("divergent", "int f^{1+q} is not finite");
    m.Q = Q;
    m.Q_root = std::pow(Q, 1.0 / (1.0 + q));
  }
  return m;
}

double kappa_bound(double tau, double q) {
  if (!(tau > 0 && tau <= 1)) throw Error("invalid moment", "need 0 < tau <= 1");
  if (!(q > 0)) throw Error("invalid moment", "need q > 0");
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return 1.0 / (1.0 + 2.0 / tau + inv_q);
}

double c_constant(double Q, double kappa, double q) {
  if (!(q > 0)) throw Error("invalid moment", "need q > 0");
  if (!(kappa >= 0)) throw Error("invalid exponent", "kappa must be non-negative");
  if (std::isinf(q)) {
    if (kappa >= 1.0) throw Error("divergent", "kappa >= q/(1+q)");
    return 1.0 + 2.0 * kappa * Q / (1.0 - kappa);
  }
  const double limit = q / (1.0 + q);
  if (kappa >= limit) throw Error("divergent", "kappa >= q/(1+q)");
  return 1.0 + kappa * std::pow(std::pow(2.0, q) * Q, 1.0 / (1.0 + q)) / (limit - kappa);
}

double aizenman_constant(double B, double Q, double kappa, double tau, double q) {
  if (!(kappa >= 0) || !(kappa < kappa_bound(tau, q))) throw Error("inadmissible kappa", "need 0 <= kappa < kappa_max");
  if (!(B > 0)) throw Error("invalid moment", "B must be positive");
  const double r = kappa / tau;
  const double kp = kappa / (1.0 - 2.0 * r);
  const double C = c_constant(Q, kp, q);
  return std::pow(B, r) * (std::pow(2.0, 1.0 + 2.0 * kappa) + 4.0) *
         (std::pow(B, 1.0 - r) + std::pow(B, r) * std::pow(C, (tau - 2.0 * kappa) / tau));
}

AizenmanVariants aizenman_variants(double B, double f_sup, double kappa, double tau) {
  AizenmanVariants v;
  const double r = kappa / tau;
  const double kp = kappa / (1.0 - 2.0 * r);
  v.C_general = c_constant(f_sup, kp, kInf);
  v.K_general = aizenman_constant(B, f_sup, kappa, tau, kInf);
  v.C_literal = 1.0 + 2.0 * kappa * f_sup / (1.0 - kappa);
  v.K_literal = std::pow(B, r) * (std::pow(2.0, 1.0 + 2.0 * kappa) + 4.0) *
                (std::pow(B, 1.0 - r) + std::pow(B, r) * std::pow(v.C_literal, (tau - 2.0 * kappa) / tau));
  return v;
}

DecouplingReport verify_decoupling(const Disorder& dis, double kappa, const std::vector<double>& alpha_grid,
                                   double tau, double q) {
  const Moments m = measure_moments(dis, tau, q);
  DecouplingReport rep;
  rep.K_kappa = aizenman_constant(m.B, m.Q, kappa, tau, q);
  rep.rows.resize(alpha_grid.size());
  parallel_for(alpha_grid.size(), [&](std::size_t i) {
    const double alpha = alpha_grid[i];
    DecouplingRow& row = rep.rows[i];
    row.alpha = alpha;
    for (const auto& [a, b] : split_support(dis, {0.0, alpha})) {
      auto dist = [&](double p, double x, double da, double db) {
        return p == a ? da : (p == b ? db : std::fabs(x - p));
      };
      row.numerator += integrate_piece(dis, a, b, [&](double x, double da, double db) {
        // separate powers: the quotient overflows next to alpha
        return std::pow(dist(0.0, x, da, db), kappa) * std::pow(dist(alpha, x, da, db), -kappa);
      });
      row.denominator += integrate_piece(dis, a, b, [&](double x, double da, double db) {
        return std::pow(dist(alpha, x, da, db), -kappa);
      });
    }
    row.ratio = row.numerator / row.denominator;
  });
  for (const auto& r : rep.rows) rep.max_ratio = std::max(rep.max_ratio, r.ratio);
  rep.pass = rep.max_ratio <= rep.K_kappa;
  return rep;
}

}  // namespace alab
