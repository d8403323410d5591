#pragma once

// Random potentials V(n) = a_n q(n) with q(n) i.i.d. from a Disorder.
//
// Each site draws from its own counter-based stream keyed by (seed, n), so a
// field is reproducible bit for bit and independent of evaluation order.

#include <cstdint>
#include <span>
#include <vector>

#include "alab/disorder.hpp"
#include "alab/envelope.hpp"
#include "alab/geometry.hpp"

namespace alab {

struct PotentialField {
  Geometry geometry;
  std::vector<double> values;  // indexed like the geometry
  std::uint64_t seed = 0;

  double sup_abs() const;
};

// Uniform variate in (0, 1) for site n of the stream seeded by seed.
double site_uniform(std::uint64_t seed, std::span<const int> n);

PotentialField sample_potential(const Envelope& env, const Disorder& dis, const Geometry& geo,
                                std::uint64_t seed);

PotentialField zero_potential(const Geometry& geo);

}  // namespace alab
