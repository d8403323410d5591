#include "alab/potential.hpp"

#include <algorithm>
#include <cmath>

namespace alab {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double PotentialField::sup_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

double site_uniform(std::uint64_t seed, std::span<const int> n) {
  std::uint64_t h = splitmix64(seed);
  for (int c : n) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)));
  // 53 random bits, centred in their cell so the result is never 0 or 1
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

PotentialField sample_potential(const Envelope& env, const Disorder& dis, const Geometry& geo, std::uint64_t seed) {
  PotentialField field{geo, std::vector<double>(geo.size(), 0.0), seed};
  std::vector<int> n(static_cast<std::size_t>(geo.axes()));
  for (std::size_t i = 0; i < geo.size(); ++i) {
    geo.coords(i, n);
    const double a = env.value(n);
    if (a == 0.0) continue;
    field.values[i] = a * dis.quantile(site_uniform(seed, n));
  }
  return field;
}

PotentialField zero_potential(const Geometry& geo) { return {geo, std::vector<double>(geo.size(), 0.0), 0}; }

}  // namespace alab
