// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "alab/asupp.hpp"
#include "alab/dynamics.hpp"
#include "alab/fm_certificate.hpp"
#include "alab/free_operator.hpp"
#include "alab/greens.hpp"
#include "alab/potential.hpp"
#include "alab/spectrum.hpp"

using namespace alab;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<double> zeros(const Geometry& g) { return std::vector<double>(g.size(), 0.0); }

// 1. band edges and periodic truncations
void band_edges_check(Outcome& o) {
  for (int nu : {1, 2}) {
    const BandEdges b = band_edges(Symbol::laplacian(nu));
    o.require(b.lower == -2.0 * nu && b.upper == 2.0 * nu, "edges of the Laplacian in dimension " + std::to_string(nu));
  }
  const Symbol cc = Symbol::uniform_cosine(1, {1.0, 1.0});
  const BandEdges bc = band_edges(cc);
  o.require(std::fabs(bc.lower + 1.125) < 1e-12 && bc.upper == 2.0, "edges of cos + cos 2");
  struct Case {
    Symbol sym;
    Geometry geo;
  };
  const std::vector<Case> cases{{Symbol::laplacian(1), Geometry(GeometryKind::full, 1, 512, Boundary::periodic)},
                                {Symbol::laplacian(2), Geometry(GeometryKind::full, 2, 16, Boundary::periodic)},
                                {cc, Geometry(GeometryKind::full, 1, 300, Boundary::periodic)}};
  double worst = 0.0;
  for (const Case& c : cases) {
    const BandEdges b = band_edges(c.sym);
    const SpectralDiagnostics d = truncated_spectrum(c.sym, c.geo, zeros(c.geo), {.vectors = false});
    worst = std::max({worst, b.lower - d.eigenvalues.front(), d.eigenvalues.back() - b.upper});
  }
  o.detail << "largest excursion outside the band " << worst;
  o.require(worst <= 1e-9, "spectrum within 1e-9 of the band");
}

// 2. G(0, 3, 0, 0) = -1/sqrt 5
void free_resolvent_check(Outcome& o) {
  const Symbol lap = Symbol::laplacian(1);
  const std::vector<int> origin{0};
  const double g = free_resolvent_kernel(lap, cplx(3.0, 0.0), origin, origin).real();
  const double exact = -1.0 / std::sqrt(5.0);
  // Dirichlet chain of 4000 sites: sum_k v_k(c)^2 / (lambda_k - E). The weights
  // v_k(c)^2 = prod_i (lambda_k - mu_i) / prod_{j != k} (lambda_k - lambda_j), with
  // mu the spectrum of the chain without site c, need eigenvalues only.
  const int n = 4000, c = n / 2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n - 1), Eigen::EigenvaluesOnly);
  Eigen::VectorXd cut = Eigen::VectorXd::Ones(n - 2);
  cut(c - 1) = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> minor;
  minor.computeFromTridiagonal(Eigen::VectorXd::Zero(n - 1), cut, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::VectorXd& mu = minor.eigenvalues();
  double oracle = 0.0, weight = 0.0;
  for (int k = 0; k < n; ++k) {
    double logw = 0.0;
    for (int i = 0; i < n - 1; ++i) logw += std::log(std::fabs(lam(k) - mu(i)));
    for (int j = 0; j < n; ++j)
      if (j != k) logw -= std::log(std::fabs(lam(k) - lam(j)));
    const double w = std::exp(logw);
    weight += w;
    oracle += w / (lam(k) - 3.0);
  }
  o.require(std::fabs(weight - 1.0) < 1e-9, "eigenvector weights sum to one");
  o.detail << "quadrature " << g << ", |err| " << std::fabs(g - exact) << ", eigensolve gap " << std::fabs(g - oracle);
  o.require(std::fabs(g - exact) < 1e-8, "within 1e-8 of -1/sqrt 5");
  o.require(std::fabs(g - oracle) < 1e-6, "within 1e-6 of the eigensolve");
}

// 3. decay bound and monotone C0
void decay_check(Outcome& o) {
  const std::vector<Symbol> symbols{Symbol::laplacian(1), Symbol::uniform_cosine(1, {1.0, 1.0})};
  double worst_ratio = 0.0, worst_drop = 0.0;
  for (const Symbol& sym : symbols) {
    const double Ep = band_edges(sym).upper;
    const DecayConstants c1 = decay_constants(sym, cplx(Ep + 1, 0.0), 0.3);
    const ResolventRow row = free_resolvent_row(sym, cplx(Ep + 1, 0.0), 30);
    for (int m = 1; m <= 30; ++m)
      for (int sgn : {-1, 1}) {
        const std::vector<int> d{sgn * m};
        const double bound = c1.C0 / std::pow(static_cast<double>(m), 6);
        worst_ratio = std::max(worst_ratio, std::abs(row.at(d)) / bound);
      }
    double prev = c1.C0;
    bool decreasing = true;
    for (int k = 2; k <= 10; ++k) {
      const double c = decay_constants(sym, cplx(Ep + k, 0.0), 0.3).C0;
      decreasing = decreasing && c < prev;
      prev = c;
    }
    worst_drop = std::max(worst_drop, prev / c1.C0);
    o.require(decreasing, "C0 strictly decreasing");
  }
  o.detail << "max |G|/bound " << worst_ratio << ", max C0(E+10)/C0(E+1) " << worst_drop;
  o.require(worst_ratio <= 1.0, "pointwise decay bound");
  o.require(worst_drop < 0.5, "C0 halves");
}

// 4. interior mass decay, full line and half-line
void propagation_check(Outcome& o) {
  std::vector<double> s;
  for (int i = 0; i <= 30; ++i) s.push_back(5.0 + 2.5 * i);
  const Symbol lap = Symbol::laplacian(1);
  const PropagationReport full = propagation_exponent(lap, WavePacket::bump(lap, {{pi / 3, 2 * pi / 3}}, 4096), s);
  const PropagationReport half = half_line_propagation(WavePacket::odd_bump({pi / 3, 2 * pi / 3}, 4096), s);
  o.detail << "slopes " << full.slope << " (" << full.verdict << "), half-line " << half.slope << " (" << half.verdict
           << ")";
  o.require(full.slope <= -1.7, "full-line slope");
  o.require(half.slope <= -1.7, "half-line slope");
}

// 5. Cook integrability
void cook_check(Outcome& o) {
  const Symbol lap = Symbol::laplacian(1);
  const WavePacket p = WavePacket::bump(lap, {{pi / 3, 2 * pi / 3}}, 4096);
  const Disorder u = Disorder::uniform(0.0, 1.0);
  const CookReport decaying = cook_certificate(lap, Envelope::axis_power(-2.0), u, p);
  const CookReport flat = cook_certificate(lap, Envelope::constant(1.0), u, p);
  o.detail << "tail exponent " << decaying.tail_exponent << ", relative change " << decaying.relative_change
           << ", constant envelope: " << flat.verdict;
  o.require(decaying.integrable, "decaying envelope integrable");
  o.require(decaying.tail_exponent < -1.5, "tail exponent");
  o.require(decaying.relative_change < 1e-2, "horizon doubling");
  o.require(!flat.integrable && flat.verdict == "not integrable", "constant envelope not integrable");
}

// 6. decoupling inequality
void decoupling_check(Outcome& o) {
  std::vector<double> alphas;
  for (int i = 0; i <= 1000; ++i) alphas.push_back(-25.0 + 0.05 * i);
  double worst = 0.0;
  for (const Disorder& d : {Disorder::uniform(0.0, 1.0), example_measure(10.0)})
    for (double k : {0.1, 0.2, 0.3}) {
      const DecouplingReport r = verify_decoupling(d, k, alphas);
      worst = std::max(worst, r.max_ratio / r.K_kappa);
      o.require(r.pass, "ratio <= K_kappa");
    }
  o.detail << "max ratio / K_kappa " << worst << ", kappa_max " << kappa_bound(1.0, kInf);
  o.require(kappa_bound(1.0, kInf) == 1.0 / 3.0, "kappa_max = 1/3");
}

// 7. rank-one identity
void rank_one_check_all(Outcome& o) {
  const Geometry g(GeometryKind::full, 2, 20, Boundary::dirichlet);
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<std::size_t> site(0, g.size() - 1);
  std::uniform_real_distribution<double> energy(-5.0, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PotentialField V =
        sample_potential(Envelope::constant(1.0), Disorder::uniform(-1.0, 1.0), g, 1000 + static_cast<unsigned>(trial));
    const SparseC H = assemble_sparse(Symbol::laplacian(2), g, V);
    const RankOneCheck r = rank_one_check(H, V.values, site(rng), cplx(energy(rng), 0.1), site(rng));
    worst = std::max(worst, r.relative_error);
  }
  o.detail << "max relative error " << worst;
  o.require(worst < 1e-10, "relative error below 1e-10");
}

// 8. bound state of H0 + lambda P0
void aronszajn_krein_check(Outcome& o) {
  const Symbol lap = Symbol::laplacian(1);
  const int n = 4000;
  double worst = 0.0;
  for (double lambda : {1.0, -1.0}) {
    const AKEigenvalue ak = aronszajn_krein_eigenvalue(lap, lambda);
    o.require(ak.found, "eigenvalue found");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), sub = Eigen::VectorXd::Ones(n - 1);
    diag(n / 2) = lambda;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const double dense = lambda > 0 ? es.eigenvalues()(n - 1) : es.eigenvalues()(0);
    worst = std::max({worst, std::fabs(ak.E - dense), std::fabs(ak.E - std::copysign(std::sqrt(5.0), lambda))});
  }
  o.detail << "max deviation " << worst;
  o.require(worst < 1e-6, "within 1e-6");
}

// 9. threshold pipeline
void threshold_check(Outcome& o) {
  const Geometry g(GeometryKind::full, 1, 1, Boundary::dirichlet);
  const Symbol lap = Symbol::laplacian(1);
  const ThresholdReport r =
      localization_threshold(lap, Envelope::axis_power(-2.0), example_measure(10.0), 0.3, {2.5, 2000.0, 2.5}, g);
  bool certified = true;
  for (const ThresholdRow& row : r.rows)
    if (std::fabs(row.E) >= r.E_mu) certified = certified && row.certified && row.rigorous && row.K_times_S < 1.0;
  o.detail << "E(mu) " << r.E_mu << ", closed form " << r.closed_form;
  o.require(r.found && std::isfinite(r.E_mu), "finite E(mu)");
  o.require(certified, "certified beyond E(mu)");
  o.require(r.closed_form_found && r.E_mu <= r.closed_form, "fractional-sum threshold <= closed form");

  const Symbol zero({AxisSymbol::cosine({0.0})});
  const Disorder u = Disorder::uniform(0.0, 1.0);
  const Moments m = measure_moments(u, 1.0, kInf);
  const double expected = std::pow(aizenman_constant(m.B, m.f_sup, 0.3, 1.0, kInf), 1.0 / 0.3);
  const double step = expected / 37.0;
  const ThresholdReport z = localization_threshold(zero, Envelope::constant(1.0), u, 0.3, {step, 100 * step, step}, g);
  const double rel = std::fabs(z.E_mu - expected) / expected;
  o.detail << ", h=0: E(mu) " << z.E_mu << " vs K^(1/s) " << expected << " (rel " << rel << ")";
  o.require(z.found && rel < 1e-12, "h = 0 matches K^(1/s)");
}

// 10. localization diagnostics on a disordered chain
void localization_check(Outcome& o) {
  const Symbol lap = Symbol::laplacian(1);
  const int L = 2000;
  const Geometry g(GeometryKind::full, 1, L, Boundary::dirichlet);
  const Envelope env = Envelope::constant(1.0);
  const Disorder dis = Disorder::uniform(-5.0, 5.0);
  const double s = 0.3;

  // scan up to the closed-form bound, which caps the fractional-sum threshold
  const Moments mo = measure_moments(dis, 1.0, kInf);
  const double K = aizenman_constant(mo.B, mo.f_sup, s, 1.0, kInf);
  double Ec = 4.0;
  while (K * std::pow(decay_constants(lap, cplx(Ec, 0.0), s).C0, s) * lattice_zeta(1, 6 * s) >= 1.0) Ec *= 2.0;
  const double step = Ec / 400.0;
  const ThresholdReport t =
      localization_threshold(lap, env, dis, s, {step, Ec, step}, Geometry(GeometryKind::full, 1, 1, Boundary::dirichlet));
  const double E = 1.01 * t.E_mu;

  const std::vector<double> etas{0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};
  std::vector<double> xi;
  int bounded = 0;
  for (int r = 0; r < 20; ++r) {
    const std::uint64_t seed = 500 + static_cast<std::uint64_t>(r);
    const PotentialField V = sample_potential(env, dis, g, seed);
    const SpectralDiagnostics d =
        truncated_spectrum(lap, g, V.values, {.vectors = true, .dense_limit = 1000, .window_center = 0.0, .window_count = 16});
    xi.insert(xi.end(), d.xi.begin(), d.xi.end());
    const std::vector<int> origin{0};
    if (simon_wolff_sum(lap, env, dis, g, seed, origin, E, etas).verdict == "bounded") ++bounded;
  }
  std::nth_element(xi.begin(), xi.begin() + static_cast<std::ptrdiff_t>(xi.size() / 2), xi.end());
  const double median = xi[xi.size() / 2];

  const SparseC H0 = assemble_sparse(lap, g, zeros(g));
  const SimonWolffResult clean = simon_wolff_sum(H0, g.origin_index(), 0.0, {0.2, 0.1, 0.05, 0.025, 0.0125});
  o.detail << "median xi " << median << " (L/4 = " << L / 4 << "), E(mu) " << t.E_mu << ", bounded " << bounded
           << "/20 at E = " << E << ", clean slope " << clean.slope << " (" << clean.verdict << ")";
  o.require(median < L / 4.0, "median xi below L/4");
  o.require(bounded >= 16, "at least 80% bounded");
  o.require(clean.verdict == "divergent-like" && std::fabs(clean.slope + 1.0) < 0.2, "1/eta growth without disorder");
}

// 11. a-supp of a constant envelope
void asupp_check(Outcome& o) {
  const double h = 0.05;
  std::vector<double> xs;
  for (int i = -20; i <= 60; ++i) xs.push_back(h * i);
  const ASuppScan scan = a_supp_scan(Envelope::constant(2.0), Disorder::uniform(0.0, 1.0),
                                     Geometry(GeometryKind::full, 1, 1, Boundary::dirichlet), xs, {1, 2},
                                     {0.1, 0.01}, 64);
  int mismatches = 0, edge = 0;
  double lo = 1e300, hi = -1e300;
  for (const ASuppPoint& p : scan.points) {
    if (p.divergent) {
      lo = std::min(lo, p.x);
      hi = std::max(hi, p.x);
    }
    const bool inside = p.x >= -1e-12 && p.x <= 2.0 + 1e-12;
    if (p.divergent != inside) {
      const double gap = std::min(std::fabs(p.x), std::fabs(p.x - 2.0));
      (gap <= h + 1e-12 ? edge : mismatches)++;
    }
  }
  o.detail << "divergent on [" << lo << ", " << hi << "], edge mismatches " << edge;
  o.require(mismatches == 0, "divergent set equals [0, 2] up to one grid step");
}

// 12. reproducibility of the command-line tool
void reproducibility_check(Outcome& o) {
  const fs::path dir = fs::temp_directory_path() / "alab_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int identical = 0, thread_stable = 0, total = 0;
  for (const std::string cmd : {"band", "spectrum", "resolvent", "propagate", "cook", "asupp", "decouple", "threshold",
                                "simonwolff", "weyl"}) {
    const std::string cfg = std::string(ALAB_CONFIG_DIR) + "/" + cmd + ".json";
    auto run = [&](const std::string& tag, unsigned threads) {
      const fs::path out = dir / (cmd + "." + tag + ".csv");
      const std::string line = std::string(ALAB_CLI) + " " + cmd + " --config " + cfg + " --seed 42 --threads " +
                               std::to_string(threads) + " --out " + out.string() + " 2>/dev/null";
      const int status = std::system(line.c_str());
      return std::make_pair(WEXITSTATUS(status), slurp(out));
    };
    const auto a = run("a", 1), b = run("b", 1), c = run("c", 3);
    ++total;
    if (a.first == b.first && !a.second.empty() && a.second == b.second) ++identical;
    else o.detail << cmd << " rerun differs; ";
    if (a.first == c.first && a.second == c.second) ++thread_stable;
    else o.detail << cmd << " differs across --threads; ";
  }
  fs::remove_all(dir);
  o.detail << identical << "/" << total << " byte-identical reruns, " << thread_stable << "/" << total
           << " identical with 3 threads";
  o.require(identical == total, "byte-identical reruns");
  o.require(thread_stable == total, "thread independence");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "band edges", 10, band_edges_check},
      {2, "free resolvent closed form", 30, free_resolvent_check},
      {3, "resolvent decay bound", 60, decay_check},
      {4, "propagation estimate", 60, propagation_check},
      {5, "Cook certificate", 120, cook_check},
      {6, "decoupling inequality", 60, decoupling_check},
      {7, "rank-one identity", 60, rank_one_check_all},
      {8, "Aronszajn-Krein", 30, aronszajn_krein_check},
      {9, "threshold pipeline", 120, threshold_check},
      {10, "localization diagnostics", 600, localization_check},
      {11, "a-supp scan", 60, asupp_check},
      {12, "reproducibility", 600, reproducibility_check},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail << " [over time budget " << c.budget_s << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
