#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "alab/config.hpp"
#include "alab/experiment.hpp"
#include "alab/free_operator.hpp"
#include "alab/output.hpp"
#include "alab/potential.hpp"
#include "alab/spectrum.hpp"
#include "alab/weyl.hpp"
#include "helpers.hpp"

using namespace alab;
namespace fs = std::filesystem;

namespace {

Geometry line(int L, Boundary bc = Boundary::dirichlet) { return Geometry(GeometryKind::full, 1, L, bc); }

double residual(const Symbol& sym, const Geometry& geo, std::span<const double> V, double E,
                const std::vector<std::complex<double>>& v) {
  const SparseC H = assemble_sparse(sym, geo, V);
  Eigen::Map<const Eigen::VectorXcd> x(v.data(), static_cast<Eigen::Index>(v.size()));
  return (H * x - E * x).norm();
}

}  // namespace

TEST_CASE("path graph eigenvalues") {
  const Geometry g = line(50);
  const std::vector<double> V(g.size(), 0.0);
  const SpectralDiagnostics d = truncated_spectrum(Symbol::laplacian(1), g, V);
  REQUIRE(d.eigenvalues.size() == 100);
  for (int k = 1; k <= 100; ++k)
    CHECK(d.eigenvalues[static_cast<std::size_t>(100 - k)] ==
          doctest::Approx(2 * std::cos(k * std::numbers::pi / 101)).epsilon(1e-12));
  for (std::size_t i = 0; i < 100; i += 17) CHECK(residual(Symbol::laplacian(1), g, V, d.eigenvalues[i], d.vectors[i]) < 1e-10);
}

TEST_CASE("rank-one perturbation has one eigenvalue above the band") {
  const Geometry g = line(400);
  std::vector<double> V(g.size(), 0.0);
  V[g.origin_index()] = 1.0;
  const SpectralDiagnostics d = truncated_spectrum(Symbol::laplacian(1), g, V);
  CHECK(d.eigenvalues.back() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(d.eigenvalues[d.eigenvalues.size() - 2] < 2.0);
  CHECK(d.eigenvalues.front() > -2.0);
  // bound state |psi(n)| ~ r^|n|, r = (sqrt 5 - 1) / 2
  CHECK(d.xi.back() == doctest::Approx(-1 / std::log((std::sqrt(5.0) - 1) / 2)).epsilon(1e-6));
}

TEST_CASE("dense spectra: norm bound and residuals") {
  const Geometry g(GeometryKind::full, 2, 8, Boundary::dirichlet);
  const Symbol sym = Symbol::uniform_cosine(2, {1.0, 1.0});
  const PotentialField V = sample_potential(Envelope::constant(3.0), Disorder::uniform(-1.0, 1.0), g, 7);
  const SpectralDiagnostics d = truncated_spectrum(sym, g, V.values);
  const BandEdges be = band_edges(sym);
  CHECK(d.eigenvalues.front() >= be.lower - V.sup_abs() - 1e-9);
  CHECK(d.eigenvalues.back() <= be.upper + V.sup_abs() + 1e-9);
  for (std::size_t i = 0; i < d.eigenvalues.size(); i += 11) CHECK(residual(sym, g, V.values, d.eigenvalues[i], d.vectors[i]) < 1e-8);

  // sine terms make the hoppings complex
  std::vector<double> table(64);
  for (int i = 0; i < 64; ++i) {
    const double t = kTwoPi * i / 64;
    table[static_cast<std::size_t>(i)] = 2 * std::cos(t) + std::sin(2 * t);
  }
  const Symbol cs({AxisSymbol::tabulated(table, 64)});
  const Geometry g1 = line(60);
  const PotentialField V1 = sample_potential(Envelope::constant(1.0), Disorder::uniform(0.0, 1.0), g1, 3);
  const SpectralDiagnostics c = truncated_spectrum(cs, g1, V1.values);
  for (std::size_t i = 0; i < c.eigenvalues.size(); i += 7) CHECK(residual(cs, g1, V1.values, c.eigenvalues[i], c.vectors[i]) < 1e-8);
}

TEST_CASE("free periodic spectrum fills the band") {
  const Geometry g = line(512, Boundary::periodic);
  const std::vector<double> V(g.size(), 0.0);
  const SpectralDiagnostics d = truncated_spectrum(Symbol::laplacian(1), g, V, {.vectors = false});
  double gap = 0;
  for (std::size_t i = 1; i < d.eigenvalues.size(); ++i) gap = std::max(gap, d.eigenvalues[i] - d.eigenvalues[i - 1]);
  CHECK(gap < 4.0 * 4.0 / 1024);
  CHECK(d.eigenvalues.front() >= -2 - 1e-9);
  CHECK(d.eigenvalues.back() <= 2 + 1e-9);
}

TEST_CASE("windowed iteration agrees with the dense solve") {
  const Geometry g(GeometryKind::full, 2, 16, Boundary::dirichlet);
  const Symbol sym = Symbol::laplacian(2);
  const PotentialField V = sample_potential(Envelope::constant(2.0), Disorder::uniform(-1.0, 1.0), g, 11);
  const SpectralDiagnostics dense = truncated_spectrum(sym, g, V.values, {.vectors = false});
  const SpectrumOptions opts{.vectors = true, .dense_limit = 100, .window_center = 0.3, .window_count = 12};
  const SpectralDiagnostics win = truncated_spectrum(sym, g, V.values, opts);
  CHECK_FALSE(win.dense);
  REQUIRE(win.eigenvalues.size() == 12);
  std::vector<double> nearest = dense.eigenvalues;
  std::sort(nearest.begin(), nearest.end(),
            [](double a, double b) { return std::fabs(a - 0.3) < std::fabs(b - 0.3); });
  nearest.resize(12);
  std::sort(nearest.begin(), nearest.end());
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(win.eigenvalues[i] == doctest::Approx(nearest[i]).epsilon(1e-9));
    CHECK(residual(sym, g, V.values, win.eigenvalues[i], win.vectors[i]) < 1e-8);
  }
}

TEST_CASE("IPR and decay length") {
  const Geometry g = line(100);
  std::vector<std::complex<double>> psi(g.size());
  psi[37] = 2.0;
  IprDecay r = ipr_and_decay(psi, g);
  CHECK(r.ipr == doctest::Approx(1.0));
  CHECK(r.xi == 0.0);
  std::fill(psi.begin(), psi.end(), std::complex<double>(0.3, 0.4));
  r = ipr_and_decay(psi, g);
  CHECK(r.ipr == doctest::Approx(1.0 / 200).epsilon(1e-12));
  CHECK(std::isinf(r.xi));
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::exp(-std::fabs(static_cast<double>(i) - 90.0) / 7.0);
  CHECK(ipr_and_decay(psi, g).xi == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(error_reason([&] { ipr_and_decay(std::vector<std::complex<double>>(3), g); }) == "dimension mismatch");
}

TEST_CASE("spacing ratio") {
  std::vector<double> fence(200);
  for (std::size_t i = 0; i < fence.size(); ++i) fence[i] = 0.1 * static_cast<double>(i);
  const SpacingRatio pf = spacing_ratio(fence, -1, 100);
  CHECK(pf.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pf.levels == 200);

  // Poisson levels against a direct draw of min/max of two exponential gaps
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> ex(1.0);
  double oracle = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double a = ex(rng), b = ex(rng);
    oracle += std::min(a, b) / std::max(a, b);
  }
  oracle /= draws;
  CHECK(oracle == doctest::Approx(2 * std::log(2.0) - 1).epsilon(0.01));
  std::vector<double> levels(20000);
  double x = 0;
  for (double& l : levels) l = (x += ex(rng));
  const SpacingRatio p = spacing_ratio(levels, 0, x);
  CHECK(std::fabs(p.mean - oracle) < 3 * p.ci_half_width);
  CHECK(p.ci_half_width < 0.01);
  CHECK(error_reason([&] { spacing_ratio(fence, 0, 4.85); }) == "too few levels");
}

TEST_CASE("Krylov overlaps") {
  const Geometry g = line(40);
  const PotentialField V = sample_potential(Envelope::constant(1.0), Disorder::uniform(-1.0, 1.0), g, 4);
  const std::size_t o = g.origin_index();
  // 2 cos 2 theta hops by two sites: even and odd sublattices never mix
  const SparseC parity = assemble_sparse(Symbol({AxisSymbol::cosine({0.0, 2.0})}), g, V);
  const KrylovOverlap split = krylov_overlap(parity, o, o + 1, 15);
  CHECK(split.dim_n == 15);
  for (double c : split.cosines) CHECK(c < 1e-12);
  const SparseC lap = assemble_sparse(Symbol::laplacian(1), g, V);
  CHECK(krylov_overlap(lap, o, o + 1, 15).cosines.front() > 0.9);
  const KrylovOverlap self = krylov_overlap(lap, o, o, 10);
  for (double c : self.cosines) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
  // the whole chain is reached: the subspace stops growing at the box size
  const Geometry small = line(3);
  const SparseC hs = assemble_sparse(Symbol::laplacian(1), small, std::vector<double>(small.size(), 0.0));
  CHECK(krylov_overlap(hs, 0, 5, 20).dim_n == 6);
}

TEST_CASE("Weyl sequence without disorder") {
  const Geometry g = line(400);
  const WeylReport r = weyl_residual(Symbol::laplacian(1), 0.0, 0.5, {2, 3, 4}, zero_potential(g));
  REQUIRE(r.rows.size() == 3);
  for (const WeylRow& row : r.rows) {
    CHECK(row.realized);
    CHECK(row.residual < 1.0 / row.l);
    CHECK(row.residual == doctest::Approx(row.base_residual).epsilon(1e-9));
  }
}

TEST_CASE("Weyl sequence at the rank-one eigenvalue") {
  const Geometry g = line(20000);
  const PotentialField V = sample_potential(Envelope::constant(1.0), Disorder::uniform(-0.1, 1.1), g, 2024);
  const WeylReport r = weyl_residual(Symbol::laplacian(1), 1.0, std::sqrt(5.0), {2, 3, 4}, V);
  for (const WeylRow& row : r.rows) {
    CHECK(row.realized);
    CHECK(row.base_residual < 1.0 / row.l);
    CHECK(row.residual <= row.bound);
    CHECK(row.bound == doctest::Approx(2.0 / row.l));
    // the event: V(alpha) near lambda, small on the rest of the cube
    const std::size_t c = g.index(row.alpha);
    CHECK(std::fabs(V.values[c] - 1.0) < 1.0 / row.l);
    for (int d = -row.radius; d <= row.radius; ++d)
      if (d != 0) CHECK(std::fabs(V.values[c + static_cast<std::size_t>(d)]) < 1.0 / row.l);
  }
  const PotentialField U = sample_potential(Envelope::constant(1.0), Disorder::uniform(0.0, 1.0), line(2000), 1);
  CHECK(error_reason([&] { weyl_residual(Symbol::laplacian(1), 5.0, std::sqrt(29.0), {2, 3}, U); }) ==
        "event not realized in finite box");
  CHECK(error_reason([&] { weyl_residual(Symbol::laplacian(1), 1.0, 2.3, {2}, U); }) == "domain");
}

TEST_CASE("config validation") {
  const json base = json::parse(R"({"symbol": {"nu": 1, "axes": [{"cos_coeffs": [2.0]}]},
    "geometry": {"kind": "full", "L": 10, "bc": "periodic"},
    "envelope": {"kind": "constant", "lambda": 1.0},
    "disorder": {"kind": "uniform", "a": 0, "b": 1, "seed": 9},
    "q": "inf"})");
  const ExperimentConfig c = load_config("spectrum", base);
  CHECK(c.seed == 9);
  CHECK(std::isinf(c.q));
  CHECK(c.geometry->size() == 20);

  auto reason = [](const std::string& cmd, json doc) { return error_reason([&] { load_config(cmd, doc); }); };
  json bad = base;
  bad["extra"] = 1;
  CHECK(reason("spectrum", bad) == "schema violation");
  bad = base;
  bad["symbol"]["nu"] = 7;
  CHECK(reason("band", bad) == "schema violation");
  bad = base;
  bad["disorder"]["kind"] = "cauchy";
  CHECK(reason("spectrum", bad) == "schema violation");
  bad = base;
  bad["spectrum"] = {{"vectors", 3}};
  CHECK(reason("spectrum", bad) == "schema violation");
  bad = base;
  bad["resolvent"] = {{"mode", "sideways"}};
  CHECK(reason("band", bad) == "schema violation");
  bad = base;
  bad.erase("geometry");
  CHECK(reason("spectrum", bad) == "schema violation");
  CHECK(reason("band", bad).empty());
  CHECK(reason("threshold", base) == "schema violation");  // no E_scan
  CHECK(reason("nonsense", base) == "schema violation");
  bad = base;
  bad["E_scan"] = {{"min", 5}, {"max", 1}, {"step", 1}};
  CHECK(reason("threshold", bad) == "schema violation");

  const json grid = json::parse(R"({"a": {"min": 0, "max": 1, "step": 0.25}, "b": [3, 1]})");
  CHECK(get_grid(grid, "a", {}) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(get_grid(grid, "b", {}) == std::vector<double>{3, 1});
  CHECK(get_grid(grid, "c", {2}) == std::vector<double>{2});
}

TEST_CASE("output formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e300) == "1e+300");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::stod(format_double(1.0 / 3)) == 1.0 / 3);
  Table t;
  t.columns = {"a", "b", "c", "d"};
  t.add({1.5, 7LL, true, std::string("x,y")});
  CHECK(to_csv(t) == "a,b,c,d\n1.5,7,true,\"x,y\"\n");
  const json j = json::parse(to_json(t, {{"k", 1}}));
  CHECK(j["rows"][0][0] == 1.5);
  CHECK(j["summary"]["k"] == 1);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("run_experiment writes outputs and manifests") {
  const fs::path dir = fs::temp_directory_path() / "alab_run_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "band.json";
  std::ofstream(cfg) << R"({"symbol": {"nu": 2, "axes": [{"cos_coeffs": [2.0]}]}})";
  std::ostringstream log;
  RunOptions o{.command = "band", .config_path = cfg.string(), .out = (dir / "band.csv").string()};
  CHECK(run_experiment(o, log) == 0);
  std::ifstream in(dir / "band.csv");
  std::stringstream body;
  body << in.rdbuf();
  CHECK(body.str() == "E_minus,E_plus\n-4,4\n");
  const json m = json::parse(std::ifstream(dir / "band.csv.manifest.json"));
  CHECK(m["command"] == "band");
  CHECK(m["output_sha256"] == sha256_hex(body.str()));
  CHECK(m["config_hash"].get<std::string>().size() == 64);

  // errors leave nothing behind
  std::ofstream(dir / "bad.json") << R"({"symbol": {"nu": 1, "axes": [{"cos_coeffs": [2.0]}]}, "oops": 1})";
  o.config_path = (dir / "bad.json").string();
  o.out = (dir / "bad.csv").string();
  CHECK(run_experiment(o, log) == 1);
  CHECK_FALSE(fs::exists(dir / "bad.csv"));
  CHECK_FALSE(fs::exists(dir / "bad.csv.manifest.json"));
  std::ofstream(dir / "broken.json") << "{\"symbol\": ";
  o.config_path = (dir / "broken.json").string();
  CHECK(run_experiment(o, log) == 1);
  CHECK_FALSE(fs::exists(dir / "bad.csv"));
  fs::remove_all(dir);
}

#ifdef ALAB_CLI
TEST_CASE("command-line exit codes") {
  const fs::path dir = fs::temp_directory_path() / "alab_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = ALAB_CLI;
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " 2>/dev/null").c_str());
    return WEXITSTATUS(status);
  };
  std::ofstream(dir / "t.json") << R"({"symbol": {"nu": 1, "axes": [{"cos_coeffs": [2.0]}]},
    "envelope": {"kind": "axis_power", "alpha": -2}, "disorder": {"kind": "two_block", "R": 10},
    "s": 0.3, "E_scan": {"min": 1, "max": 5, "step": 1}})";
  std::ofstream(dir / "b.json") << R"({"symbol": {"nu": 1, "axes": [{"cos_coeffs": [2.0]}]}})";
  const std::string out = (dir / "o.csv").string();
  CHECK(run("band --config " + (dir / "b.json").string() + " --out " + out) == 0);
  CHECK(fs::exists(out));
  CHECK(fs::exists(out + ".manifest.json"));
  fs::remove(out);
  CHECK(run("threshold --config " + (dir / "t.json").string() + " --out " + out) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run("band --config " + (dir / "missing.json").string() + " --out " + out) == 1);
  CHECK(run("band --config " + (dir / "b.json").string() + " --format xml --out " + out) == 1);
  CHECK(run("frobnicate --config " + (dir / "b.json").string()) == 1);
  CHECK_FALSE(fs::exists(out));
  fs::remove_all(dir);
}
#endif
