#include "alab/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "alab/error.hpp"
#include "alab/free_operator.hpp"
#include "alab/greens.hpp"
#include "alab/simd/kernels.hpp"

namespace alab {
namespace {

int hopping_range(const Symbol& sym) {
  int K = 0;
  for (const auto& a : sym.axes())
    for (const auto& [d, t] : axis_hoppings(a)) K = std::max(K, std::abs(d));
  return K;
}

// psi on the cube |d|_inf <= R, stored on a local Dirichlet box wide enough
// that H0 psi is exact.
struct LocalVector {
  Geometry box;
  cvec values;
  int R = 0;
};

template <class F>
LocalVector local_vector(int nu, int R, int K, F&& f) {
  LocalVector v;
  v.R = R;
  v.box = Geometry(GeometryKind::full, nu, R + K + 1, Boundary::dirichlet);
  v.values.assign(v.box.size(), 0.0);
  std::vector<int> c(static_cast<std::size_t>(nu));
  for (std::size_t i = 0; i < v.box.size(); ++i) {
    v.box.coords(i, c);
    bool inside = true;
    for (int x : c) inside = inside && std::abs(x) <= R;
    if (inside) v.values[i] = f(std::span<const int>(c));
  }
  const double n = std::sqrt(simd::norm_sq(v.values));
  for (auto& x : v.values) x /= n;
  return v;
}

// |(H0 + lambda P0 - E) psi| for normalized psi
double local_residual(const Symbol& sym, const LocalVector& v, double lambda, double E) {
  cvec r = apply_free(sym, v.box, v.values);
  const std::size_t o = v.box.origin_index();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= E * v.values[i];
  r[o] += lambda * v.values[o];
  return std::sqrt(simd::norm_sq(r));
}

// theta with h(theta) = E along the segment from a minimizer to a maximizer.
std::vector<double> band_point(const Symbol& sym, double E) {
  const int nu = sym.nu();
  constexpr int n = 4096;
  std::vector<double> lo(static_cast<std::size_t>(nu)), hi(static_cast<std::size_t>(nu));
  for (int j = 0; j < nu; ++j) {
    const auto g = sym.axis(j).grid(n, 0);
    const auto [mn, mx] = std::minmax_element(g.begin(), g.end());
    lo[static_cast<std::size_t>(j)] = kTwoPi * static_cast<double>(mn - g.begin()) / n;
    hi[static_cast<std::size_t>(j)] = kTwoPi * static_cast<double>(mx - g.begin()) / n;
  }
  auto at = [&](double t) {
    std::vector<double> th(static_cast<std::size_t>(nu));
    for (std::size_t j = 0; j < th.size(); ++j) th[j] = lo[j] + t * (hi[j] - lo[j]);
    return th;
  };
  double a = 0.0, b = 1.0;
  double fa = sym.value(at(a)) - E;
  const double fb = sym.value(at(b)) - E;
  if (fa > 0.0 || fb < 0.0) throw Error("domain", "E outside the band");
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = sym.value(at(m)) - E;
    if ((fm <= 0.0) == (fa <= 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return at(0.5 * (a + b));
}

constexpr int kMaxRadius = 1 << 14;

LocalVector approximant(const Symbol& sym, double lambda, double E, int l, int K) {
  const int nu = sym.nu();
  const double target = 1.0 / l;
  if (lambda != 0.0) {
    int M = 32;
    ResolventRow row = free_resolvent_row(sym, cplx(E, 0.0), M);
    for (int R = 0; R <= kMaxRadius; ++R) {
      if (R > M) {
        M *= 2;
        if (std::pow(2.0 * M + 1, nu) > 1e7) break;
        row = free_resolvent_row(sym, cplx(E, 0.0), M);
      }
      // (H0 - E)^{-1} delta_0 evaluated at d is conj G(0, d) for real E
      LocalVector v = local_vector(nu, R, K, [&](std::span<const int> d) { return std::conj(row.at(d)); });
      if (local_residual(sym, v, lambda, E) < target) return v;
    }
    throw Error("no convergence", "truncated eigenvector residual stays above 1/l");
  }
  const std::vector<double> theta = band_point(sym, E);
  for (int R = 4; R <= kMaxRadius; R *= 2) {
    if (std::pow(2.0 * R + 1, nu) > 1e7) break;
    LocalVector v = local_vector(nu, R, K, [&](std::span<const int> d) {
      double w = 1.0;
      double phase = 0.0;
      for (int j = 0; j < nu; ++j) {
        const double x = d[static_cast<std::size_t>(j)] / (R + 1.0);
        const double c = std::cos(0.5 * std::numbers::pi * x);
        w *= c * c;
        phase += theta[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(j)];
      }
      return w * std::polar(1.0, phase);
    });
    if (local_residual(sym, v, 0.0, E) < target) return v;
  }
  throw Error("no convergence", "windowed plane wave residual stays above 1/l");
}

}  // namespace

WeylReport weyl_residual(const Symbol& sym, double lambda, double E, const std::vector<int>& l_list,
                         const PotentialField& V) {
  const Geometry& geo = V.geometry;
  if (geo.kind() != GeometryKind::full || geo.nu() != sym.nu())
    throw Error("dimension mismatch", "potential must live on a full box of the symbol dimension");
  if (lambda != 0.0) {
    const double g00 = free_resolvent_kernel(sym, cplx(E, 0.0), std::vector<int>(sym.nu(), 0),
                                             std::vector<int>(sym.nu(), 0))
                           .real();
    if (std::abs(1.0 + lambda * g00) > 1e-8) throw Error("domain", "E is not the eigenvalue of H0 + lambda P0");
  }

  const int nu = sym.nu();
  const int K = hopping_range(sym);
  WeylReport report;
  report.lambda = lambda;
  report.E = E;
  const SparseC H = assemble_sparse(sym, geo, V);
  bool any = false;

  for (int l : l_list) {
    if (l < 1) throw Error("domain", "l must be positive");
    const double tol = 1.0 / l;
    WeylRow row;
    row.l = l;
    row.bound = 2.0 / l;
    const LocalVector psi = approximant(sym, lambda, E, l, K);
    row.radius = psi.R;
    row.base_residual = local_residual(sym, psi, lambda, E);

    std::vector<int> c(static_cast<std::size_t>(nu)), s(static_cast<std::size_t>(nu));
    std::vector<int> d(static_cast<std::size_t>(nu));
    const auto width = static_cast<std::size_t>(2 * psi.R + 1);
    std::size_t cube = 1;
    for (int j = 0; j < nu; ++j) cube *= width;

    auto admissible = [&](std::span<const int> alpha) {
      // keep the hopping range inside the box so the Dirichlet cut does not touch H0 phi
      for (int j = 0; j < nu; ++j) {
        const int a = alpha[static_cast<std::size_t>(j)];
        if (a - psi.R - K < geo.origin(j) || a + psi.R + K > geo.origin(j) + geo.extent(j) - 1) return false;
      }
      for (std::size_t q = 0; q < cube; ++q) {
        std::size_t r = q;
        bool centre = true;
        for (int j = nu - 1; j >= 0; --j) {
          d[static_cast<std::size_t>(j)] = static_cast<int>(r % width) - psi.R;
          r /= width;
          s[static_cast<std::size_t>(j)] = alpha[static_cast<std::size_t>(j)] + d[static_cast<std::size_t>(j)];
          centre = centre && d[static_cast<std::size_t>(j)] == 0;
        }
        if (!geo.contains(s)) return false;
        const double v = V.values[geo.index(s)];
        if (centre ? std::abs(v - lambda) >= tol : std::abs(v) >= tol) return false;
      }
      return true;
    };

    for (std::size_t i = 0; i < geo.size(); ++i) {
      geo.coords(i, c);
      if (!admissible(c)) continue;
      row.realized = true;
      row.alpha = c;
      break;
    }
    if (row.realized) {
      any = true;
      cvec phi(geo.size(), 0.0);
      std::vector<int> lc(static_cast<std::size_t>(nu));
      for (std::size_t i = 0; i < psi.box.size(); ++i) {
        if (psi.values[i] == 0.0) continue;
        psi.box.coords(i, lc);
        for (int j = 0; j < nu; ++j) lc[static_cast<std::size_t>(j)] += row.alpha[static_cast<std::size_t>(j)];
        phi[geo.index(lc)] = psi.values[i];
      }
      Eigen::Map<const Eigen::VectorXcd> x(phi.data(), static_cast<Eigen::Index>(phi.size()));
      const Eigen::VectorXcd r = H * x - E * x;
      row.residual = r.norm();
    }
    report.rows.push_back(std::move(row));
  }
  if (!any) throw VerdictNegative("event not realized in finite box");
  return report;
}

}  // namespace alab
