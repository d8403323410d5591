#pragma once

// Deterministic envelopes a_n >= 0 multiplying the i.i.d. couplings, and the
// tail function g(R) = sup { a_n : |n_i| > R for all i }.

#include <span>
#include <string>
#include <vector>

namespace alab {

enum class EnvelopeKind { constant, axis_power, product_power, surface_strip, table };

class Envelope {
 public:
  static Envelope constant(double lambda);
  // (1 + |n_1|)^alpha, alpha <= 0
  static Envelope axis_power(double alpha);
  // prod_i (1 + |n_i|)^alpha_i, all alpha_i <= 0
  static Envelope product_power(std::vector<double> alphas);
  // 1 for n_1 <= N, 0 otherwise
  static Envelope surface_strip(int N);
  // values[r] at sup-norm radius r = max_i |n_i|, 0 beyond the table
  static Envelope table(std::vector<double> values);

  EnvelopeKind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  int strip_width() const noexcept { return strip_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double value(std::span<const int> n) const;
  double sup() const noexcept { return sup_; }
  bool is_zero() const noexcept { return sup_ == 0.0; }

 private:
  EnvelopeKind kind_ = EnvelopeKind::constant;
  double lambda_ = 0.0;
  std::vector<double> alphas_;
  int strip_ = 0;
  std::vector<double> values_;
  double sup_ = 0.0;
};

double envelope_value(const Envelope& env, std::span<const int> n);

struct TailInfo {
  double g = 0.0;
  bool integrable = false;
  double fitted_exponent = 0.0;  // table kind only
};

// Requires R >= 1. Throws "insufficient tail data" for tables shorter than 16.
TailInfo tail_function(const Envelope& env, double R);

}  // namespace alab
