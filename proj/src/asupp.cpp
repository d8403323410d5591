#include "alab/asupp.hpp"

#include <cmath>

#include "alab/error.hpp"
#include "alab/parallel.hpp"

namespace alab {
namespace {

struct Weighted {
  int m;
  double count;
};

// Coordinates m in kZ with |m| <= C (m >= 0 on a half axis).
std::vector<Weighted> signed_axis(int k, int C, bool half) {
  std::vector<Weighted> out;
  for (int m = half ? 0 : -(C / k) * k; m <= C; m += k) out.push_back({m, 1.0});
  return out;
}

// Distinct |m| with multiplicities.
std::vector<Weighted> folded_axis(int k, int C, bool half) {
  std::vector<Weighted> out;
  for (int m = 0; m <= C; m += k) out.push_back({m, (m == 0 || half) ? 1.0 : 2.0});
  return out;
}

// Distinct envelope values with multiplicities over n in kZ^d, |n|_inf <= C.
std::vector<std::pair<double, double>> value_counts(const Envelope& env, const Geometry& geo, int k, int C) {
  const int d = geo.axes();
  const bool half = geo.kind() == GeometryKind::half;
  std::vector<std::pair<double, double>> out;
  const auto kind = env.kind();
  if (kind == EnvelopeKind::constant || kind == EnvelopeKind::axis_power || kind == EnvelopeKind::surface_strip) {
    double rest = 1.0;
    for (int g = 1; g < d; ++g) rest *= static_cast<double>(signed_axis(k, C, false).size());
    std::vector<int> n(static_cast<std::size_t>(d), 0);
    for (const auto& w : signed_axis(k, C, half)) {
      n[0] = w.m;
      out.emplace_back(env.value(n), rest);
    }
    return out;
  }
  std::vector<std::vector<Weighted>> axes;
  double total = 1.0;
  for (int g = 0; g < d; ++g) {
    axes.push_back(folded_axis(k, C, half && g == 0));
    total *= static_cast<double>(axes.back().size());
  }
  if (total > 5e7) throw Error("cutoff too large", "a-supp enumeration exceeds 5e7 classes");
  std::vector<int> n(static_cast<std::size_t>(d), 0);
  auto rec = [&](auto&& self, int g, double mult) -> void {
    if (g == d) {
      out.emplace_back(env.value(n), mult);
      return;
    }
    for (const auto& w : axes[static_cast<std::size_t>(g)]) {
      n[static_cast<std::size_t>(g)] = w.m;
      self(self, g + 1, mult * w.count);
    }
  };
  rec(rec, 0, 1.0);
  return out;
}

double partial_sum(const std::vector<std::pair<double, double>>& vc, const Disorder& dis, double x, double eps) {
  double s = 0.0;
  for (const auto& [a, mult] : vc) {
    if (a <= 0.0) continue;
    s += mult * (dis.cdf((x + eps) / a) - dis.cdf((x - eps) / a));
  }
  return s;
}

}  // namespace

ASuppScan a_supp_scan(const Envelope& env, const Disorder& dis, const Geometry& geo, const std::vector<double>& x_grid,
                      const std::vector<int>& k_list, const std::vector<double>& eps_list, int cutoff) {
  if (cutoff < 1) throw Error("invalid cutoff", "cutoff must be positive");
  for (int k : k_list)
    if (k < 1) throw Error("invalid stride", "k must be positive");
  for (double e : eps_list)
    if (!(e > 0)) throw Error("invalid width", "eps must be positive");

  // value classes per (k, cutoff level)
  std::vector<std::vector<std::pair<double, double>>> classes(k_list.size() * 3);
  parallel_for(classes.size(), [&](std::size_t i) {
    const int level = static_cast<int>(i % 3);
    classes[i] = value_counts(env, geo, k_list[i / 3], cutoff << level);
  });

  ASuppScan scan;
  const std::size_t per_x = k_list.size() * eps_list.size();
  scan.rows.resize(x_grid.size() * per_x);
  parallel_for(x_grid.size(), [&](std::size_t xi) {
    std::size_t r = xi * per_x;
    for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
      for (double eps : eps_list) {
        ASuppRow& row = scan.rows[r++];
        row.x = x_grid[xi];
        row.k = k_list[ki];
        row.eps = eps;
        for (int level = 0; level < 3; ++level)
          row.sums[level] = partial_sum(classes[ki * 3 + static_cast<std::size_t>(level)], dis, row.x, eps);
        // increments over the two dyadic steps: logarithmic or faster growth
        // keeps them comparable, a summable tail makes the second one shrink
        const double d1 = row.sums[1] - row.sums[0];
        const double d2 = row.sums[2] - row.sums[1];
        row.divergent = d2 > 1e-12 && d2 >= 0.5 * d1;
        row.high_confidence = row.divergent ? d2 >= 0.9 * d1 : (row.sums[2] <= 1e-12 || d2 <= 0.1 * d1);
      }
    }
  });

  for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
    ASuppPoint p{x_grid[xi], true, true};
    for (std::size_t j = 0; j < per_x; ++j) {
      const auto& row = scan.rows[xi * per_x + j];
      p.divergent = p.divergent && row.divergent;
      p.high_confidence = p.high_confidence && row.high_confidence;
    }
    scan.points.push_back(p);
  }
  return scan;
}

}  // namespace alab
