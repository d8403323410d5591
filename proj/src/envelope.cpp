#include "alab/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alab/error.hpp"

namespace alab {

Envelope Envelope::constant(double lambda) {
  if (lambda < 0) throw Error("invalid envelope", "a_n must be non-negative");
  Envelope e;
  e.kind_ = EnvelopeKind::constant;
  e.lambda_ = lambda;
  e.sup_ = lambda;
  return e;
}

Envelope Envelope::axis_power(double alpha) {
  if (alpha > 0) throw Error("invalid envelope", "alpha > 0 gives an unbounded envelope");
  Envelope e;
  e.kind_ = EnvelopeKind::axis_power;
  e.alphas_ = {alpha};
  e.sup_ = 1.0;
  return e;
}

Envelope Envelope::product_power(std::vector<double> alphas) {
  if (alphas.empty()) throw Error("invalid envelope", "no exponents");
  for (double a : alphas)
    if (a > 0) throw Error("invalid envelope", "alpha_i > 0 gives an unbounded envelope");
  Envelope e;
  e.kind_ = EnvelopeKind::product_power;
  e.alphas_ = std::move(alphas);
  e.sup_ = 1.0;
  return e;
}

Envelope Envelope::surface_strip(int N) {
  if (N < 0) throw Error("invalid envelope", "strip width must be non-negative");
  Envelope e;
  e.kind_ = EnvelopeKind::surface_strip;
  e.strip_ = N;
  e.sup_ = 1.0;
  return e;
}

Envelope Envelope::table(std::vector<double> values) {
  if (values.empty()) throw Error("invalid envelope", "empty table");
  for (double v : values)
    if (!(v >= 0) || !std::isfinite(v)) throw Error("invalid envelope", "a_n must be finite and non-negative");
  Envelope e;
  e.kind_ = EnvelopeKind::table;
  e.sup_ = *std::max_element(values.begin(), values.end());
  e.values_ = std::move(values);
  return e;
}

double Envelope::value(std::span<const int> n) const {
  switch (kind_) {
    case EnvelopeKind::constant:
      return lambda_;
    case EnvelopeKind::axis_power:
      return std::pow(1.0 + std::abs(n[0]), alphas_[0]);
    case EnvelopeKind::product_power: {
      if (n.size() != alphas_.size()) throw Error("dimension mismatch", "one exponent per axis");
      double a = 1.0;
      for (std::size_t i = 0; i < n.size(); ++i) a *= std::pow(1.0 + std::abs(n[i]), alphas_[i]);
      return a;
    }
    case EnvelopeKind::surface_strip:
      return n[0] <= strip_ ? 1.0 : 0.0;
    case EnvelopeKind::table: {
      int r = 0;
      for (int c : n) r = std::max(r, std::abs(c));
      return static_cast<std::size_t>(r) < values_.size() ? values_[static_cast<std::size_t>(r)] : 0.0;
    }
  }
  return 0.0;
}

double envelope_value(const Envelope& env, std::span<const int> n) { return env.value(n); }

TailInfo tail_function(const Envelope& env, double R) {
  if (!(R >= 1.0)) throw Error("invalid radius", "tail function needs R >= 1");
  TailInfo t;
  switch (env.kind()) {
    case EnvelopeKind::constant:
      t.g = env.lambda();
      t.integrable = env.lambda() == 0.0;
      break;
    case EnvelopeKind::axis_power:
      t.g = std::pow(1.0 + R, env.alphas()[0]);
      t.integrable = env.alphas()[0] < -1.0;
      break;
    case EnvelopeKind::product_power: {
      double total = 0.0;
      for (double a : env.alphas()) total += a;
      t.g = std::pow(1.0 + R, total);
      t.integrable = total < -1.0;
      break;
    }
    case EnvelopeKind::surface_strip:
      // |n_1| > R excludes the strip once R >= N
      t.g = R < env.strip_width() ? 1.0 : 0.0;
      t.integrable = true;
      break;
    case EnvelopeKind::table: {
      const auto& v = env.values();
      if (v.size() < 16) throw Error("insufficient tail data", "table needs at least 16 radii");
      const auto first = static_cast<std::size_t>(std::floor(R)) + 1;
      t.g = 0.0;
      for (std::size_t r = first; r < v.size(); ++r) t.g = std::max(t.g, v[r]);
      // log-log slope over the outer half of the table
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int m = 0;
      bool zero_tail = true;
      for (std::size_t r = v.size() / 2; r < v.size(); ++r) {
        if (v[r] <= 0) continue;
        zero_tail = false;
        const double x = std::log(1.0 + static_cast<double>(r));
        const double y = std::log(v[r]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
      }
      if (zero_tail) {
        t.integrable = true;
        t.fitted_exponent = -std::numeric_limits<double>::infinity();
      } else if (m < 2) {
        throw Error("insufficient tail data", "fewer than two positive tail entries");
      } else {
        t.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        t.integrable = t.fitted_exponent < -1.0;
      }
      break;
    }
  }
  return t;
}

}  // namespace alab
