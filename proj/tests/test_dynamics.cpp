#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "alab/dynamics.hpp"
#include "alab/free_operator.hpp"
#include "alab/simd/kernels.hpp"
#include "helpers.hpp"

using namespace alab;
using std::numbers::pi;

namespace {

// exp(-i s H) v by dense eigendecomposition
Eigen::VectorXcd dense_evolve(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& v, double s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Eigen::VectorXcd c = es.eigenvectors().adjoint() * v;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -s * es.eigenvalues()(k));
  return es.eigenvectors() * c;
}

Eigen::VectorXcd as_eigen(const cvec& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double norm(const cvec& v) { return std::sqrt(simd::norm_sq(v)); }

}  // namespace

TEST_CASE("evolution matches a dense matrix exponential") {
  const Symbol sym({AxisSymbol::cosine({1.0, 0.5})});
  const WavePacket p = WavePacket::bump(sym, {{0.4, 1.4}}, 256);
  const Geometry geo = p.geometry();
  const std::vector<double> zero(geo.size(), 0.0);
  const Eigen::MatrixXcd H = Eigen::MatrixXcd(assemble_sparse(sym, geo, zero));
  for (double s : {0.0, 3.0, 20.0}) {
    const cvec psi = evolve(sym, p, s);
    const Eigen::VectorXcd ref = dense_evolve(H, as_eigen(p.lattice()), s);
    CHECK((as_eigen(psi) - ref).norm() < 1e-10);
  }
  CHECK((as_eigen(evolve(sym, p, 0.0)) - as_eigen(p.lattice())).norm() < 1e-13);
}

TEST_CASE("unitarity, group law and energy conservation") {
  const Symbol sym = Symbol::laplacian(1);
  const WavePacket p = WavePacket::bump(sym, {{pi / 3, 2 * pi / 3}}, 1024);
  const Geometry geo = p.geometry();
  const std::vector<double> zero(geo.size(), 0.0);
  const SparseC H = assemble_sparse(sym, geo, zero);
  const cvec phi = p.lattice();
  CHECK(norm(phi) == doctest::Approx(1.0).epsilon(1e-12));
  auto energy = [&](const cvec& v) { return as_eigen(v).dot(H * as_eigen(v)).real(); };
  const double e0 = energy(phi);
  for (double s : {1.0, 17.5, 100.0}) {
    const cvec psi = evolve(sym, p, s);
    CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(energy(psi) - e0) < 1e-10);
  }
  // evolve(s + t) = exp(-i t H) evolve(s), with the second step taken by apply_free
  // through the dense oracle on a smaller box
  const WavePacket q = WavePacket::bump(sym, {{pi / 3, 2 * pi / 3}}, 128);
  const Geometry gq = q.geometry();
  const Eigen::MatrixXcd Hq = Eigen::MatrixXcd(assemble_sparse(sym, gq, std::vector<double>(gq.size(), 0.0)));
  const Eigen::VectorXcd two_step = dense_evolve(Hq, as_eigen(evolve(sym, q, 6.0)), 9.0);
  CHECK((two_step - as_eigen(evolve(sym, q, 15.0))).norm() < 1e-10);
  CHECK(error_reason([&] { evolve(sym, q, 40.0); }) == "box too small");
}

TEST_CASE("narrow packet centroid moves with the group velocity") {
  const Symbol sym = Symbol::laplacian(1);
  const double t0 = 1.0;
  const WavePacket p = WavePacket::bump(sym, {{t0 - 0.05, t0 + 0.05}}, 4096);
  auto centroid = [&](const cvec& v) {
    double m = 0, w = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double n = static_cast<double>(i) - static_cast<double>(v.size() / 2);
      m += n * std::norm(v[i]);
      w += std::norm(v[i]);
    }
    return m / w;
  };
  const double c0 = centroid(evolve(sym, p, 0.0));
  const double c1 = centroid(evolve(sym, p, 400.0));
  // stationary phase of n theta - s h(theta) gives velocity h'(theta_0)
  CHECK((c1 - c0) / 400.0 == doctest::Approx(-2.0 * std::sin(t0)).epsilon(5e-3));
}

TEST_CASE("interior mass") {
  const Symbol sym = Symbol::laplacian(2);
  const WavePacket p = WavePacket::bump(sym, {{0.6, 1.6}, {1.8, 2.6}}, 128);
  const cvec psi = evolve(sym, p, 8.0);
  const double direct = interior_mass(psi, p.v_phi(), 8.0, p.geometry());
  const double factored = interior_mass_factored(evolve_axes(sym, p, 8.0), p.v_phi(), 8.0);
  CHECK(direct == doctest::Approx(factored).epsilon(1e-10));
  CHECK(direct <= 1.0 + 1e-12);
  CHECK(interior_mass(p.lattice(), p.v_phi(), 1e-9, p.geometry()) <= 1.0 + 1e-12);
}

TEST_CASE("propagation decays like s^-2") {
  std::vector<double> s;
  for (int i = 0; i <= 30; ++i) s.push_back(5.0 + 2.5 * i);
  const Symbol lap = Symbol::laplacian(1);
  const PropagationReport r = propagation_exponent(lap, WavePacket::bump(lap, {{pi / 3, 2 * pi / 3}}, 4096), s);
  CHECK(r.slope <= -1.7);
  CHECK(r.verdict == "consistent with -2");
  CHECK(r.ci_low <= r.slope);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(r.mass[i] * s[i] * s[i] < 1e3);

  // four critical points at multiples of pi / 2
  const Symbol c2({AxisSymbol::cosine({0.0, 2.0})});
  const PropagationReport r2 = propagation_exponent(c2, WavePacket::bump(c2, {{0.3, 1.2}}, 4096), s);
  CHECK(r2.slope <= -1.7);
  // doubled resolution gives the same masses
  const PropagationReport r3 = propagation_exponent(c2, WavePacket::bump(c2, {{0.3, 1.2}}, 8192), s);
  CHECK(r3.slope == doctest::Approx(r2.slope).epsilon(1e-3));

  CHECK(error_reason([&] { WavePacket::bump(lap, {{-0.3, 0.4}}, 256); }) == "zero minimal velocity");
  const std::vector<double> few{1, 2, 3};
  CHECK(error_reason([&] { propagation_exponent(lap, WavePacket::bump(lap, {{1.0, 2.0}}, 256), few); }) == "too few points");
}

TEST_CASE("half-line mass agrees with a dense Dirichlet half-line evolution") {
  const WavePacket p = WavePacket::odd_bump({pi / 2 - 0.4, pi / 2 + 0.4}, 1024);
  CHECK(p.w_phi() == doctest::Approx(2 * std::cos(0.4)).epsilon(1e-9));
  const int K = 500;
  const cvec phi1 = half_line_values(p.lattice(), K);
  CHECK(norm(phi1) == doctest::Approx(1.0).epsilon(1e-12));
  // Delta_+ on sites 1..K with the wall at 0
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(K, K);
  for (int i = 0; i + 1 < K; ++i) H(i, i + 1) = H(i + 1, i) = 1.0;
  for (double s : {10.0, 40.0, 80.0}) {
    const Eigen::VectorXcd psi = dense_evolve(H, as_eigen(phi1), s);
    const double R = p.w_phi() * s / 4.0;
    double acc = 0.0;
    for (int n = 1; n <= K; ++n)
      if (n < R) acc += std::norm(psi(n - 1));
    CHECK(half_line_mass(p, s) == doctest::Approx(std::sqrt(acc)).epsilon(1e-8));
  }
  std::vector<double> s;
  for (int i = 0; i <= 30; ++i) s.push_back(5.0 + 2.5 * i);
  const PropagationReport r = half_line_propagation(WavePacket::odd_bump({pi / 3, 2 * pi / 3}, 4096), s);
  CHECK(r.slope <= -1.7);
  CHECK(half_line_mass(p, 0.0) <= 1.0 + 1e-12);

  cvec even(1024);
  for (int k = 0; k < 1024; ++k) {
    const double th = 2 * pi * k / 1024;
    even[static_cast<std::size_t>(k)] = smooth_bump((th - pi / 2) / 0.3) + smooth_bump((2 * pi - th - pi / 2) / 0.3);
  }
  CHECK(error_reason([&] { WavePacket::odd_from_spectrum(even, {pi / 2 - 0.3, pi / 2 + 0.3}); }) == "not odd");
  CHECK(error_reason([] { WavePacket::odd_bump({0.0, 1.0}, 256); }) == "zero minimal velocity");
}

TEST_CASE("Cook integrand and certificate") {
  const Symbol sym = Symbol::laplacian(1);
  const WavePacket p = WavePacket::bump(sym, {{pi / 3, 2 * pi / 3}}, 4096);
  const Disorder u = Disorder::uniform(0.0, 1.0);
  const double sigma = std::sqrt(1.0 / 3.0);
  CHECK(disorder_sigma(u) == doctest::Approx(sigma));

  CHECK(cook_integrand(sym, Envelope::constant(0.0), u, p, 3.0).integrand == 0.0);

  const Envelope env = Envelope::axis_power(-2.0);
  // s = 0: sigma |A phi| computed directly
  const cvec phi = p.lattice();
  const Geometry g = p.geometry();
  double a2 = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) a2 += std::pow(env.value(g.coords(i)), 2) * std::norm(phi[i]);
  CHECK(cook_integrand(sym, env, u, p, 0.0).integrand == doctest::Approx(sigma * std::sqrt(a2)).epsilon(1e-12));

  const CookReport rep = cook_certificate(sym, env, u, p);
  CHECK(rep.integrable);
  CHECK(rep.verdict == "integrable");
  CHECK(rep.tail_exponent < -1.5);
  CHECK(rep.relative_change < 1e-2);
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const CookPoint& c = rep.points[i];
    CHECK(c.integrand <= c.bound_tail + c.bound_interior + 1e-12);
    CHECK(c.integrand <= sigma * env.sup() + 1e-12);
    if (i > 0) CHECK(rep.cumulative[i] >= rep.cumulative[i - 1]);
  }
  for (const auto& [s, w] : rep.weighted_norms) CHECK(std::isfinite(w));

  const CookReport flat = cook_certificate(sym, Envelope::constant(1.0), u, p);
  CHECK_FALSE(flat.integrable);
  CHECK(flat.verdict == "not integrable");

  const CookReport none = cook_certificate(sym, Envelope::constant(0.0), u, p);
  CHECK(none.integrable);
  CHECK(none.integral_T == 0.0);

  CookOptions shortest;
  shortest.horizon = 1.5;
  CHECK(error_reason([&] { cook_certificate(sym, env, u, p, shortest); }) == "horizon insufficient for fit");
}
