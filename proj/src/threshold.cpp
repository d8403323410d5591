#include <algorithm>
#include <cmath>
#include <limits>

#include "alab/error.hpp"
#include "alab/fm_certificate.hpp"
#include "alab/greens.hpp"
#include "alab/parallel.hpp"

namespace alab {
namespace {

constexpr double kHuge = std::numeric_limits<double>::infinity();

struct SideValue {
  double S = kHuge;
  bool rigorous = false;
};

// Fractional sum at real energy E, doubling M until the tail is dominated.
SideValue fractional_at(const Symbol& sym, bool half, double E, double s, const ThresholdOptions& opt) {
  for (int M = opt.M; M <= opt.max_M; M *= 2) {
    try {
      const FractionalSum f = half ? fractional_sum_half(sym, cplx(E, 0.0), s, M) : fractional_sum(sym, cplx(E, 0.0), s, M);
      return {f.value, f.rigorous};
    } catch (const Error& e) {
      if (e.reason() == "increase M") continue;
      if (e.reason() == "singular integrand") return {};
      throw;
    }
  }
  return {};
}

Symbol bulk_symbol(const Symbol& sym, bool half) {
  if (!half) return sym;
  std::vector<AxisSymbol> axes{AxisSymbol::cosine({2.0})};
  for (const auto& a : sym.axes()) axes.push_back(a);
  return Symbol(std::move(axes));
}

}  // namespace

ThresholdReport localization_threshold(const Symbol& sym, const Envelope& env, const Disorder& dis, double s,
                                       const EnergyScan& scan, const Geometry& geo, const ThresholdOptions& options) {
  const bool half = geo.kind() == GeometryKind::half;
  const Symbol bulk = bulk_symbol(sym, half);
  const int d = bulk.nu();
  ThresholdReport rep;
  rep.s = s;
  rep.kappa_max = kappa_bound(options.tau, options.q);
  const double s_min = static_cast<double>(d) / (3.0 * d + 3.0);
  if (!(s > s_min)) throw Error("C(s) divergent", "need s > nu / (3 nu + 3)");
  if (!(s < rep.kappa_max)) throw Error("invalid exponent", "need s < kappa_max");
  if (!(scan.step > 0) || !(scan.max >= scan.min) || !(scan.min >= 0))
    throw Error("invalid scan", "need 0 <= min <= max and step > 0");

  rep.moments = measure_moments(dis, options.tau, options.q);
  rep.K_s = aizenman_constant(rep.moments.B, rep.moments.Q, s, options.tau, options.q);
  rep.K = std::pow(env.sup(), s) * rep.K_s;
  const BandEdges edges = band_edges(bulk);
  rep.E0 = std::max(std::fabs(edges.lower), std::fabs(edges.upper));

  std::vector<double> mags;
  const auto count = static_cast<std::size_t>(std::floor((scan.max - scan.min) / scan.step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) mags.push_back(scan.min + scan.step * static_cast<double>(i));

  // rows for -|E| and +|E| per magnitude
  rep.rows.resize(2 * mags.size());
  parallel_for(rep.rows.size(), [&](std::size_t i) {
    const double E = (i % 2 == 0 ? -1.0 : 1.0) * mags[i / 2];
    const SideValue v = fractional_at(sym, half, E, s, options);
    ThresholdRow& row = rep.rows[i];
    row.E = E;
    row.S = v.S;
    row.rigorous = v.rigorous;
    row.K_times_S = rep.K * v.S;
    row.certified = std::isfinite(v.S) && v.rigorous && row.K_times_S < 1.0;
  });

  auto certified_mag = [&](std::size_t i) { return rep.rows[2 * i].certified && rep.rows[2 * i + 1].certified; };
  if (mags.empty() || !certified_mag(mags.size() - 1))
    throw VerdictNegative("no certificate in range", "largest scanned |E| is not certified");
  std::size_t first = mags.size() - 1;
  while (first > 0 && certified_mag(first - 1)) --first;
  rep.found = true;
  rep.E_mu = mags[first];
  if (first > 0) {
    // crossing of K S(+-E) = 1 between the last uncertified and first certified magnitude
    auto ok = [&](double m) {
      for (double E : {-m, m}) {
        const SideValue v = fractional_at(sym, half, E, s, options);
        if (!(std::isfinite(v.S) && v.rigorous && rep.K * v.S < 1.0)) return false;
      }
      return true;
    };
    double lo = mags[first - 1];
    double hi = mags[first];
    for (int it = 0; it < 60 && hi - lo > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? hi : lo) = mid;
    }
    rep.E_mu = hi;
  }

  // closed form: K C0(E)^s C(s) < 1 for both signs
  const int order = bulk.smoothness_order();
  if (s * order > d) {
    const double Cs = lattice_zeta(d, s * order);
    auto ok_closed = [&](double m) {
      for (double E : {-m, m}) {
        if (!(band_distance(bulk, cplx(E, 0.0)) > 0)) return false;
        const double D = derivative_bound(bulk, cplx(E, 0.0), order);
        const double C0 = std::max(D, 1.0 / band_distance(bulk, cplx(E, 0.0)));
        if (!(rep.K * std::pow(C0, s) * Cs < 1.0)) return false;
      }
      return true;
    };
    double lo = rep.E0;
    double hi = std::max(2.0 * rep.E0, rep.E0 + 1.0);
    while (!ok_closed(hi) && hi < 1e15) {
      lo = hi;
      hi *= 2.0;
    }
    if (ok_closed(hi)) {
      for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok_closed(mid) ? hi : lo) = mid;
      }
      rep.closed_form = hi;
      rep.closed_form_found = true;
    }
  }
  return rep;
}

}  // namespace alab
