#pragma once

// Finite-cutoff evidence for membership in a-supp(mu): for each x, stride k
// and half-width eps, the partial sums over n in kZ^d, |n|_inf <= C, 2C, 4C of
// mu(a_n^{-1}(x - eps, x + eps)). Sites with a_n = 0 contribute nothing.

#include <string>
#include <vector>

#include "alab/disorder.hpp"
#include "alab/envelope.hpp"
#include "alab/geometry.hpp"

namespace alab {

struct ASuppRow {
  double x = 0.0;
  int k = 1;
  double eps = 0.0;
  double sums[3] = {0.0, 0.0, 0.0};
  bool divergent = false;
  bool high_confidence = false;
};

struct ASuppPoint {
  double x = 0.0;
  bool divergent = false;  // divergent for every k and eps
  bool high_confidence = false;
};

struct ASuppScan {
  std::vector<ASuppRow> rows;
  std::vector<ASuppPoint> points;
};

// geo supplies the dimension and the half-space restriction n_1 >= 0; its box
// size is ignored.
ASuppScan a_supp_scan(const Envelope& env, const Disorder& dis, const Geometry& geo,
                      const std::vector<double>& x_grid, const std::vector<int>& k_list,
                      const std::vector<double>& eps_list, int cutoff);

}  // namespace alab
