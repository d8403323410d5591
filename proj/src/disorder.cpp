#include "alab/disorder.hpp"

#include <algorithm>
#include <cmath>

#include "alab/error.hpp"

namespace alab {

Disorder Disorder::uniform(double a, double b) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw Error("invalid disorder", "uniform needs a < b");
  Disorder d;
  d.kind_ = DisorderKind::uniform;
  d.x_ = {a, b};
  d.left_ = {1.0 / (b - a)};
  d.right_ = d.left_;
  d.params_ = {a, b};
  d.finalize();
  return d;
}

Disorder Disorder::two_block(double eps, double delta, double R) {
  if (!(eps > 0 && eps < 1) || !(delta > 0) || !(R > delta))
    throw Error("invalid disorder", "two_block needs 0 < eps < 1 and 0 < delta < R");
  Disorder d;
  d.kind_ = DisorderKind::two_block;
  d.x_ = {0.0, delta, R};
  d.left_ = {(1.0 - eps) / delta, eps / (R - delta)};
  d.right_ = d.left_;
  d.params_ = {eps, delta, R};
  d.finalize();
  return d;
}

Disorder Disorder::density_table(std::vector<double> x, std::vector<double> f) {
  if (x.size() < 2 || x.size() != f.size()) throw Error("invalid disorder", "density table needs matching x and f");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i + 1] > x[i])) throw Error("invalid disorder", "x must be strictly increasing");
  for (double v : f)
    if (!(v >= 0) || !std::isfinite(v)) throw Error("invalid disorder", "density must be finite and non-negative");
  Disorder d;
  d.kind_ = DisorderKind::density_table;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) total += 0.5 * (f[i] + f[i + 1]) * (x[i + 1] - x[i]);
  if (!(total > 0)) throw Error("invalid disorder", "density has zero mass");
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    d.left_.push_back(f[i] / total);
    d.right_.push_back(f[i + 1] / total);
  }
  d.params_ = x;
  d.params_.insert(d.params_.end(), f.begin(), f.end());
  d.x_ = std::move(x);
  d.finalize();
  return d;
}

void Disorder::finalize() {
  mass_.assign(x_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x_.size(); ++i)
    mass_[i + 1] = mass_[i] + 0.5 * (left_[i] + right_[i]) * (x_[i + 1] - x_[i]);
}

double Disorder::density(double x) const {
  if (x < x_.front() || x > x_.back()) return 0.0;
  auto it = std::lower_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (i + 1 >= x_.size()) i = x_.size() - 2;
  const double w = x_[i + 1] - x_[i];
  return left_[i] + (right_[i] - left_[i]) * (x - x_[i]) / w;
}

double Disorder::cdf(double x) const {
  if (x <= x_.front()) return 0.0;
  if (x >= x_.back()) return 1.0;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double w = x_[i + 1] - x_[i];
  const double u = x - x_[i];
  return std::clamp(mass_[i] + left_[i] * u + (right_[i] - left_[i]) * u * u / (2.0 * w), 0.0, 1.0);
}

double Disorder::quantile(double u) const {
  if (!(u > 0 && u < 1)) throw Error("invalid probability", "quantile needs 0 < u < 1");
  auto it = std::upper_bound(mass_.begin(), mass_.end(), u);
  std::size_t i = it == mass_.begin() ? 0 : static_cast<std::size_t>(it - mass_.begin()) - 1;
  if (i + 1 >= x_.size()) i = x_.size() - 2;
  const double w = x_[i + 1] - x_[i];
  const double c = u - mass_[i];
  const double a = (right_[i] - left_[i]) / (2.0 * w);
  const double disc = std::max(0.0, left_[i] * left_[i] + 4.0 * a * c);
  const double den = left_[i] + std::sqrt(disc);
  const double t = den > 0 ? 2.0 * c / den : 0.0;
  return x_[i] + std::clamp(t, 0.0, w);
}

double Disorder::f_sup() const {
  double m = 0.0;
  for (std::size_t i = 0; i < left_.size(); ++i) m = std::max({m, left_[i], right_[i]});
  return m;
}

double Disorder::moment(int p) const {
  if (p < 0) throw Error("invalid moment", "order must be non-negative");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double x0 = x_[i];
    const double x1 = x_[i + 1];
    // f = alpha + beta x on the piece
    const double beta = (right_[i] - left_[i]) / (x1 - x0);
    const double alpha = left_[i] - beta * x0;
    acc += alpha * (std::pow(x1, p + 1) - std::pow(x0, p + 1)) / (p + 1) +
           beta * (std::pow(x1, p + 2) - std::pow(x0, p + 2)) / (p + 2);
  }
  return acc;
}

Disorder example_measure(double R) {
  if (!(R > 1)) throw Error("invalid disorder", "example measure needs R > 1");
  return Disorder::two_block(1.0 / (R * R * R), 1.0 / (R * R), R);
}

}  // namespace alab
