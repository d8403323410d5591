#pragma once

// Absolutely continuous single-site distributions mu with density f.

#include <vector>

namespace alab {

enum class DisorderKind { uniform, two_block, density_table };

class Disorder {
 public:
  static Disorder uniform(double a, double b);
  // density (1 - eps)/delta on [0, delta], eps/(R - delta) on (delta, R]
  static Disorder two_block(double eps, double delta, double R);
  // piecewise-linear density through (x_i, f_i), normalized to unit mass
  static Disorder density_table(std::vector<double> x, std::vector<double> f);

  DisorderKind kind() const noexcept { return kind_; }
  double lower() const noexcept { return x_.front(); }
  double upper() const noexcept { return x_.back(); }
  // Points where the density may be non-smooth, sorted, including the ends.
  const std::vector<double>& breakpoints() const noexcept { return x_; }

  double density(double x) const;
  double cdf(double x) const;
  double quantile(double u) const;  // inverse cdf on (0, 1)
  double f_sup() const;
  // int x^p dmu, exact for the piecewise-linear density.
  double moment(int p) const;
  // Density is linear on [x_i, x_{i+1}] with end values left_[i], right_[i].
  double piece_left(std::size_t i) const { return left_[i]; }
  double piece_right(std::size_t i) const { return right_[i]; }

  // Constructor parameters, for reporting.
  const std::vector<double>& params() const noexcept { return params_; }

 private:
  void finalize();

  DisorderKind kind_ = DisorderKind::uniform;
  std::vector<double> x_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::vector<double> mass_;  // cumulative mass at x_[i]
  std::vector<double> params_;
};

// Two-block member of the small-moment family: eps = R^-3, delta = R^-2.
Disorder example_measure(double R);

}  // namespace alab
