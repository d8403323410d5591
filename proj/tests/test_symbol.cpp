#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "alab/symbol.hpp"
#include "helpers.hpp"

using namespace alab;
using std::numbers::pi;

namespace {

AxisSymbol two_cos() { return AxisSymbol::cosine({2.0}); }
AxisSymbol cos_plus_cos2() { return AxisSymbol::cosine({1.0, 1.0}); }

// theta^p (2 pi - theta)^p on n samples
AxisSymbol polynomial_axis(int p, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double th = 2 * pi * i / n;
    t[static_cast<std::size_t>(i)] = std::pow(th, p) * std::pow(2 * pi - th, p);
  }
  return AxisSymbol::tabulated(std::move(t), n);
}

std::pair<double, double> grid_range(const AxisSymbol& a, int n) {
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < n; ++i) {
    const double v = a.value(2 * pi * i / n);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("critical sets of cosine symbols") {
  const auto c1 = axis_critical_points(two_cos());
  REQUIRE(c1.size() == 2);
  CHECK(c1[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(c1[1] == doctest::Approx(pi).epsilon(1e-10));

  const auto c2 = axis_critical_points(AxisSymbol::cosine({0.0, 2.0}));
  REQUIRE(c2.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(c2[static_cast<std::size_t>(k)] == doctest::Approx(k * pi / 2).epsilon(1e-10));

  // -sin t (1 + 4 cos t) vanishes at 0, pi and the two arccos(-1/4) angles
  const auto c3 = axis_critical_points(cos_plus_cos2());
  REQUIRE(c3.size() == 4);
  const double a = std::acos(-0.25);
  const std::vector<double> expect{0.0, a, pi, 2 * pi - a};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(c3[i] - expect[i]) < 1e-9);
  for (double t : c3) CHECK(std::abs(cos_plus_cos2().derivative(t, 1)) < 1e-9);
}

TEST_CASE("critical sets are symmetric under reflection") {
  for (const auto& coeffs : {std::vector<double>{1.0, 0.3}, std::vector<double>{0.2, -1.0, 0.7}}) {
    const auto c = axis_critical_points(AxisSymbol::cosine(coeffs));
    for (double t : c) {
      const double r = t == 0.0 ? 0.0 : 2 * pi - t;
      const bool found = std::any_of(c.begin(), c.end(), [&](double u) { return std::abs(u - r) < 1e-9; });
      CHECK(found);
    }
  }
}

TEST_CASE("band edges") {
  const BandEdges b1 = band_edges(Symbol::laplacian(1));
  CHECK(b1.lower == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(b1.upper == doctest::Approx(2.0).epsilon(1e-14));
  const BandEdges b2 = band_edges(Symbol::laplacian(2));
  CHECK(b2.lower == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(b2.upper == doctest::Approx(4.0).epsilon(1e-14));

  const BandEdges z = band_edges(Symbol({AxisSymbol::cosine({0.0})}));
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);

  const BandEdges b3 = band_edges(Symbol({cos_plus_cos2()}));
  const auto [lo, hi] = grid_range(cos_plus_cos2(), 1 << 20);
  CHECK(b3.lower == doctest::Approx(-1.125).epsilon(1e-12));
  CHECK(b3.upper == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(b3.lower <= lo + 1e-12);
  CHECK(b3.upper >= hi - 1e-12);

  // separability: edges add over axes
  const Symbol mixed({two_cos(), cos_plus_cos2()});
  const BandEdges bm = band_edges(mixed);
  CHECK(bm.lower == doctest::Approx(-2.0 - 1.125).epsilon(1e-12));
  CHECK(bm.upper == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("derivative sup norms") {
  CHECK(axis_derivative_sup(two_cos(), 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(axis_derivative_sup(two_cos(), 3) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(axis_derivative_sup(cos_plus_cos2(), 2) == doctest::Approx(5.0).epsilon(1e-12));
  // grid oracle for a higher order
  const AxisSymbol a = AxisSymbol::cosine({0.5, -0.25, 0.125});
  double sup = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double t = 2 * pi * i / 200000;
    const double d = -0.5 * std::sin(t) * 1 + 0.25 * 8 * std::sin(2 * t) - 0.125 * 27 * std::sin(3 * t);
    sup = std::max(sup, std::abs(d));
  }
  CHECK(axis_derivative_sup(a, 3) >= sup - 1e-9);
  CHECK(axis_derivative_sup(a, 3) == doctest::Approx(sup).epsilon(1e-6));
}

TEST_CASE("derivatives match finite differences and grids") {
  const AxisSymbol a = AxisSymbol::cosine({0.7, -0.2, 0.05});
  for (double t : {0.1, 1.3, 2.9, 5.5}) {
    const double h = 1e-5;
    for (int k = 0; k < 4; ++k) {
      const double fd = (a.derivative(t + h, k) - a.derivative(t - h, k)) / (2 * h);
      CHECK(a.derivative(t, k + 1) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
  const auto g = a.grid(64, 2);
  for (int i = 0; i < 64; ++i) CHECK(g[static_cast<std::size_t>(i)] == doctest::Approx(a.derivative(2 * pi * i / 64, 2)).epsilon(1e-12));
}

TEST_CASE("hoppings reproduce the symbol") {
  const AxisSymbol a = AxisSymbol::cosine({2.0, 0.5});
  CHECK(a.hopping(0) == std::complex<double>(0.0));
  CHECK(a.hopping(1) == std::complex<double>(1.0));
  CHECK(a.hopping(-2) == std::complex<double>(0.25));
  const double t = 0.77;
  std::complex<double> s = 0;
  for (int d = -3; d <= 3; ++d) s += a.hopping(d) * std::polar(1.0, d * t);
  CHECK(std::abs(s - a.value(t)) < 1e-14);
}

TEST_CASE("tabulated symbols interpolate spectrally") {
  const int n = 64;
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = 2 * std::cos(2 * pi * i / n) + 0.3 * std::cos(3 * 2 * pi * i / n);
  const AxisSymbol a = AxisSymbol::tabulated(t, n);
  for (double th : {0.3, 1.7, 4.0}) {
    CHECK(a.value(th) == doctest::Approx(2 * std::cos(th) + 0.3 * std::cos(3 * th)).epsilon(1e-12));
    CHECK(a.derivative(th, 1) == doctest::Approx(-2 * std::sin(th) - 0.9 * std::sin(3 * th)).epsilon(1e-12));
  }
  CHECK(axis_critical_points(AxisSymbol::tabulated(std::vector<double>(t.begin(), t.end()), n)).size() ==
        axis_critical_points(AxisSymbol::cosine({2.0, 0.0, 0.3})).size());
}

TEST_CASE("minimal velocity") {
  const Symbol s = Symbol::laplacian(1);
  const std::vector<Interval> a{{pi / 3, 2 * pi / 3}};
  CHECK(minimal_velocity(s, a) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  const std::vector<Interval> b{{pi / 2 - 0.1, pi / 2 + 0.1}};
  CHECK(minimal_velocity(s, b) == doctest::Approx(2 * std::cos(0.1)).epsilon(1e-10));
  const std::vector<Interval> bad{{-0.2, 0.3}};
  CHECK(error_reason([&] { minimal_velocity(s, bad); }) == "zero minimal velocity");

  // shrinking the support never lowers v
  double prev = 0.0;
  for (double w : {1.2, 0.8, 0.4, 0.1}) {
    const std::vector<Interval> iv{{pi / 2 - w, pi / 2 + w}};
    const double v = minimal_velocity(s, iv);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("hypothesis validation") {
  const HypothesisReport r1 = validate_hypotheses(Symbol::laplacian(1));
  CHECK(r1.passed());
  CHECK(r1.axes[0].root_count == 2);
  const HypothesisReport r2 = validate_hypotheses(Symbol({cos_plus_cos2()}));
  CHECK(r2.passed());
  CHECK(r2.axes[0].root_count == 4);

  const Symbol poly({polynomial_axis(7, kMinTabulatedSamples)});
  const HypothesisReport r3 = validate_hypotheses(poly);
  CHECK(r3.passed());
  CHECK(r3.axes[0].derivative_periodic);

  const Symbol short_table({polynomial_axis(7, 1024)});
  CHECK(error_reason([&] { validate_hypotheses(short_table); }) == "insufficient smoothness data");

  // a sawtooth-like table breaks derivative periodicity
  std::vector<double> saw(kMinTabulatedSamples);
  for (int i = 0; i < kMinTabulatedSamples; ++i) {
    const double th = 2 * pi * i / kMinTabulatedSamples;
    saw[static_cast<std::size_t>(i)] = std::pow(th, 2) * std::pow(2 * pi - th, 1);
  }
  const HypothesisReport r4 = validate_hypotheses(Symbol({AxisSymbol::tabulated(saw, kMinTabulatedSamples)}));
  CHECK_FALSE(r4.passed());
}

TEST_CASE("flat symbols have no finite critical set") {
  CHECK(error_reason([] { axis_critical_points(AxisSymbol::cosine({0.0})); }) == "critical set not finite at tolerance");
}
