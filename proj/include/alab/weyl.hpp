#pragma once

// Approximate eigenvectors of H0 + lambda P0, translated to sites where a
// sampled potential looks locally like lambda P0, and their residuals under
// the random operator.

#include <vector>

#include "alab/potential.hpp"
#include "alab/symbol.hpp"

namespace alab {

struct WeylRow {
  int l = 1;
  bool realized = false;
  std::vector<int> alpha;      // translate site
  int radius = 0;              // support half-width of psi_l
  double base_residual = 0.0;  // |(H0 + lambda P0 - E) psi_l| < 1/l
  double residual = 0.0;       // |(H - E) phi_l|
  double bound = 0.0;          // 2 / l
};

struct WeylReport {
  double lambda = 0.0;
  double E = 0.0;
  std::vector<WeylRow> rows;
};

// For lambda != 0, E must be the rank-one eigenvalue (|1 + lambda G00(E)| < 1e-8);
// for lambda = 0, E must lie in the band. Throws VerdictNegative("event not
// realized in finite box") when no l finds an admissible translate.
WeylReport weyl_residual(const Symbol& sym, double lambda, double E, const std::vector<int>& l_list,
                         const PotentialField& V);

}  // namespace alab
