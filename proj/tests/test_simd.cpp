#include <doctest.h>

#include <complex>
#include <random>
#include <vector>

#include "alab/simd/kernels.hpp"

using namespace alab::simd;

namespace {

std::vector<double> random_doubles(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const KernelTable* fast = avx2_kernels();
  if (fast == nullptr) {
    MESSAGE("AVX2 kernels unavailable on this machine; equivalence not exercised");
    return;
  }
  const KernelTable& ref = scalar_kernels();
  // odd lengths exercise the remainder loops
  for (std::size_t n : {0u, 1u, 3u, 7u, 8u, 33u, 1001u}) {
    CAPTURE(n);
    const auto x = random_doubles(2 * n, 1 + static_cast<unsigned>(n));
    const auto w = random_doubles(n, 7 + static_cast<unsigned>(n));
    const auto h = random_doubles(n, 11 + static_cast<unsigned>(n));
    const auto wi = random_doubles(n, 13 + static_cast<unsigned>(n));

    CHECK(rel(ref.sum_sq(x.data(), 2 * n), fast->sum_sq(x.data(), 2 * n)) < 1e-13);
    CHECK(rel(ref.sum_abs4(x.data(), n), fast->sum_abs4(x.data(), n)) < 1e-13);
    CHECK(rel(ref.weighted_sum_sq(x.data(), w.data(), n), fast->weighted_sum_sq(x.data(), w.data(), n)) < 1e-13);

    const auto a = ref.resolvent_sum(h.data(), w.data(), wi.data(), n, 0.3, 0.05);
    const auto b = fast->resolvent_sum(h.data(), w.data(), wi.data(), n, 0.3, 0.05);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));

    std::vector<double> y1 = random_doubles(2 * n, 99), y2 = y1;
    ref.caxpy({0.7, -1.3}, x.data(), y1.data(), n);
    fast->caxpy({0.7, -1.3}, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < 2 * n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));
  }
}

TEST_CASE("scalar kernels match direct formulas") {
  const KernelTable& k = scalar_kernels();
  const std::vector<std::complex<double>> z{{1, 2}, {-3, 0.5}, {0, -1}};
  const double* p = reinterpret_cast<const double*>(z.data());
  double s2 = 0, s4 = 0;
  for (auto v : z) {
    s2 += std::norm(v);
    s4 += std::norm(v) * std::norm(v);
  }
  CHECK(k.sum_sq(p, 6) == doctest::Approx(s2));
  CHECK(k.sum_abs4(p, 3) == doctest::Approx(s4));

  const std::vector<double> h{0.5, -1.0, 2.0}, wr{1, 2, 3}, wi{0.5, 0, -1};
  std::complex<double> expect = 0;
  for (int i = 0; i < 3; ++i) expect += std::complex<double>(wr[i], wi[i]) / (h[i] - std::complex<double>(0.2, 0.1));
  const auto got = k.resolvent_sum(h.data(), wr.data(), wi.data(), 3, 0.2, 0.1);
  CHECK(std::abs(got - expect) < 1e-14);
}

TEST_CASE("dispatch honours the selected table") {
  const KernelTable& k = kernels();
  CHECK((k.name == "scalar" || k.name == "avx2"));
}
