#include "alab/free_operator.hpp"

#include <algorithm>
#include <cmath>

#include "alab/error.hpp"
#include "alab/fft.hpp"

namespace alab {
namespace {

constexpr double kKernelCut = 1e-14;

void check_shapes(const Symbol& sym, const Geometry& geo, std::size_t n) {
  if (sym.nu() != geo.nu()) throw Error("dimension mismatch", "symbol and geometry disagree on nu");
  if (n != geo.size()) throw Error("dimension mismatch", "vector length differs from box size");
}

// Calls f(base) for the first element of every line along box axis g.
template <class F>
void for_each_line(const Geometry& geo, int g, F&& f) {
  const std::size_t n = static_cast<std::size_t>(geo.extent(g));
  const std::size_t s = geo.stride(g);
  const std::size_t outer = geo.size() / (n * s);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < s; ++in) f(o * n * s + in, s, n);
}

template <class Scalar>
std::vector<Eigen::Triplet<Scalar>> free_triplets(const Symbol& sym, const Geometry& geo,
                                                  std::span<const double> potential, double max_bytes) {
  check_shapes(sym, geo, potential.size());
  std::vector<std::vector<std::pair<int, std::complex<double>>>> hops;
  std::size_t per_site = 1;
  for (int g = 0; g < geo.axes(); ++g) {
    if (geo.is_half_axis(g)) {
      hops.emplace_back();
      per_site += 2;
    } else {
      hops.push_back(axis_hoppings(sym.axis(geo.symbol_axis(g))));
      per_site += hops.back().size();
    }
  }
  const double bytes = static_cast<double>(geo.size()) * static_cast<double>(per_site) * 64.0;
  if (bytes > max_bytes) throw Error("box too large", "estimated " + std::to_string(bytes) + " bytes");

  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(geo.size() * per_site);
  std::vector<int> n(static_cast<std::size_t>(geo.axes()));
  auto value = [](std::complex<double> t) {
    if constexpr (std::is_same_v<Scalar, double>) {
      return t.real();
    } else {
      return t;
    }
  };
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    if (potential[i] != 0.0) trip.emplace_back(row, row, Scalar(potential[i]));
    geo.coords(i, n);
    for (int g = 0; g < geo.axes(); ++g) {
      const int c = n[static_cast<std::size_t>(g)] - geo.origin(g);
      const int extent = geo.extent(g);
      const auto stride = static_cast<Eigen::Index>(geo.stride(g));
      if (geo.is_half_axis(g)) {
        // (Delta_+ u)(0) = u(1); (Delta_+ u)(n) = u(n+1) + u(n-1)
        if (c + 1 < extent) trip.emplace_back(row, row + stride, Scalar(1.0));
        if (c >= 1) trip.emplace_back(row, row - stride, Scalar(1.0));
        continue;
      }
      for (const auto& [d, t] : hops[static_cast<std::size_t>(g)]) {
        int target = c + d;
        if (geo.boundary() == Boundary::periodic) {
          target = ((target % extent) + extent) % extent;
        } else if (target < 0 || target >= extent) {
          continue;
        }
        trip.emplace_back(row, row + static_cast<Eigen::Index>(target - c) * stride, value(t));
      }
    }
  }
  return trip;
}

}  // namespace

std::vector<std::pair<int, std::complex<double>>> axis_hoppings(const AxisSymbol& axis) {
  const int K = axis.degree();
  double tmax = 0.0;
  for (int d = -K; d <= K; ++d) tmax = std::max(tmax, std::abs(axis.hopping(d)));
  const double cut = kKernelCut * std::max(1.0, tmax);
  std::vector<std::pair<int, std::complex<double>>> out;
  for (int d = -K; d <= K; ++d) {
    const auto t = axis.hopping(d);
    if (std::abs(t) >= cut) out.emplace_back(d, t);
  }
  return out;
}

cvec apply_free(const Symbol& sym, const Geometry& geo, std::span<const std::complex<double>> psi) {
  check_shapes(sym, geo, psi.size());
  cvec out(psi.size(), 0.0);
  cvec line;
  cvec res;
  for (int g = 0; g < geo.axes(); ++g) {
    const int extent = geo.extent(g);
    line.assign(static_cast<std::size_t>(extent), 0.0);
    res.assign(static_cast<std::size_t>(extent), 0.0);
    if (geo.is_half_axis(g)) {
      for_each_line(geo, g, [&](std::size_t base, std::size_t s, std::size_t n) {
        for (std::size_t e = 0; e < n; ++e) {
          std::complex<double> acc = e + 1 < n ? psi[base + (e + 1) * s] : 0.0;
          if (e >= 1) acc += psi[base + (e - 1) * s];
          out[base + e * s] += acc;
        }
      });
      continue;
    }
    const AxisSymbol& axis = sym.axis(geo.symbol_axis(g));
    if (geo.boundary() == Boundary::periodic) {
      const std::vector<double> hgrid = axis.grid(extent, 0);
      const Fft fft({extent});
      const double inv = 1.0 / extent;
      for_each_line(geo, g, [&](std::size_t base, std::size_t s, std::size_t n) {
        for (std::size_t e = 0; e < n; ++e) line[e] = psi[base + e * s];
        fft.forward(line);
        for (std::size_t e = 0; e < n; ++e) line[e] *= hgrid[e] * inv;
        fft.backward(line);
        for (std::size_t e = 0; e < n; ++e) out[base + e * s] += line[e];
      });
    } else {
      const auto hops = axis_hoppings(axis);
      for_each_line(geo, g, [&](std::size_t base, std::size_t s, std::size_t n) {
        const long nn = static_cast<long>(n);
        for (long e = 0; e < nn; ++e) {
          std::complex<double> acc = 0.0;
          for (const auto& [d, t] : hops) {
            const long j = e + d;
            if (j >= 0 && j < nn) acc += t * psi[base + static_cast<std::size_t>(j) * s];
          }
          out[base + static_cast<std::size_t>(e) * s] += acc;
        }
      });
    }
  }
  return out;
}

SparseC assemble_sparse(const Symbol& sym, const Geometry& geo, std::span<const double> potential, double max_bytes) {
  const auto trip = free_triplets<std::complex<double>>(sym, geo, potential, max_bytes);
  const auto n = static_cast<Eigen::Index>(geo.size());
  SparseC m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseC assemble_sparse(const Symbol& sym, const Geometry& geo, const PotentialField& V, double max_bytes) {
  return assemble_sparse(sym, geo, V.values, max_bytes);
}

SparseR assemble_sparse_real(const Symbol& sym, const Geometry& geo, std::span<const double> potential,
                             double max_bytes) {
  for (const auto& axis : sym.axes())
    if (axis.has_sine_terms()) throw Error("complex hoppings", "symbol has sine terms");
  const auto trip = free_triplets<double>(sym, geo, potential, max_bytes);
  const auto n = static_cast<Eigen::Index>(geo.size());
  SparseR m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace alab
