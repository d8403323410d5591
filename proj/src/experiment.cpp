#include "alab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "alab/asupp.hpp"
#include "alab/dynamics.hpp"
#include "alab/error.hpp"
#include "alab/fm_certificate.hpp"
#include "alab/greens.hpp"
#include "alab/parallel.hpp"
#include "alab/potential.hpp"
#include "alab/spectrum.hpp"
#include "alab/weyl.hpp"

namespace alab {
namespace {

std::string join_coords(std::span<const int> n) {
  std::string out;
  for (std::size_t i = 0; i < n.size(); ++i) out += (i ? ";" : "") + std::to_string(n[i]);
  return out;
}

// Middle third of the widest gap between critical angles.
Interval default_support(const AxisSymbol& axis) {
  const auto crit = axis_critical_points(axis);
  if (crit.empty()) throw Error("zero minimal velocity", "no default packet support");
  double best = -1.0, lo = 0.0;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const double a = crit[i];
    const double b = i + 1 < crit.size() ? crit[i + 1] : crit[0] + kTwoPi;
    if (b - a > best) {
      best = b - a;
      lo = a;
    }
  }
  double start = lo + best / 3.0;
  if (start >= kTwoPi) start -= kTwoPi;
  return {start, start + best / 3.0};
}

std::vector<Interval> supports_from(const ExperimentConfig& cfg, const Symbol& sym) {
  std::vector<Interval> out;
  if (cfg.section.contains("support")) {
    const auto& arr = cfg.section["support"];
    if (arr.size() != 1 && arr.size() != static_cast<std::size_t>(sym.nu()))
      throw Error("schema violation", "support: expected one interval or one per axis");
    for (int j = 0; j < sym.nu(); ++j) {
      const auto& p = arr[arr.size() == 1 ? 0 : static_cast<std::size_t>(j)];
      out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
  }
  for (int j = 0; j < sym.nu(); ++j) out.push_back(default_support(sym.axis(j)));
  return out;
}

std::vector<double> sampled_or_zero(const ExperimentConfig& cfg, const Geometry& geo) {
  return sample_potential(*cfg.envelope, *cfg.disorder, geo, cfg.seed).values;
}

CommandResult run_band(const ExperimentConfig& cfg) {
  CommandResult r;
  const BandEdges b = band_edges(cfg.symbol);
  r.table.columns = {"E_minus", "E_plus"};
  r.table.add({b.lower, b.upper});
  r.summary = {{"E_minus", b.lower}, {"E_plus", b.upper}};
  return r;
}

CommandResult run_spectrum(const ExperimentConfig& cfg) {
  const Geometry& geo = *cfg.geometry;
  const json& sec = cfg.section;
  std::vector<double> V = get_bool(sec, "zero_potential", false) ? std::vector<double>(geo.size(), 0.0)
                                                                  : sampled_or_zero(cfg, geo);
  if (sec.contains("rank_one_lambda")) V[geo.origin_index()] += get_number(sec, "rank_one_lambda", 0.0);
  SpectrumOptions opt;
  opt.vectors = get_bool(sec, "vectors", true);
  opt.dense_limit = static_cast<std::size_t>(get_int(sec, "dense_limit", 4096));
  opt.window_center = get_number(sec, "window_center", 0.0);
  opt.window_count = get_int(sec, "window_count", 32);
  const SpectralDiagnostics d = truncated_spectrum(cfg.symbol, geo, V, opt);

  CommandResult r;
  r.table.columns = {"index", "E", "ipr", "xi"};
  const double nan = std::nan("");
  for (std::size_t i = 0; i < d.eigenvalues.size(); ++i)
    r.table.add({static_cast<long long>(i), d.eigenvalues[i], opt.vectors ? d.ipr[i] : nan,
                 opt.vectors ? d.xi[i] : nan});
  r.summary["levels"] = d.eigenvalues.size();
  r.summary["dense"] = d.dense;
  r.summary["seed"] = cfg.seed;
  if (sec.contains("krylov_pairs")) {
    const SparseC H = assemble_sparse(cfg.symbol, geo, V);
    const int dim = get_int(sec, "krylov_dim", 20);
    json overlaps = json::array();
    for (const auto& p : sec["krylov_pairs"]) {
      const auto n = p[0].get<std::vector<int>>();
      const auto m = p[1].get<std::vector<int>>();
      const KrylovOverlap k = krylov_overlap(H, geo.index(n), geo.index(m), dim);
      overlaps.push_back({{"n", join_coords(n)}, {"m", join_coords(m)}, {"dim_n", k.dim_n}, {"dim_m", k.dim_m},
                          {"max_cosine", k.cosines.empty() ? 0.0 : k.cosines.front()}, {"cosines", k.cosines}});
    }
    r.summary["krylov"] = overlaps;
  }
  if (sec.contains("ratio_window")) {
    const auto w = get_numbers(sec, "ratio_window", {});
    const SpacingRatio sr = spacing_ratio(d.eigenvalues, w[0], w[1]);
    r.summary["spacing_ratio"] = {{"mean", sr.mean}, {"ci_half_width", sr.ci_half_width}, {"levels", sr.levels}};
  }
  return r;
}

CommandResult run_resolvent(const ExperimentConfig& cfg) {
  const json& sec = cfg.section;
  const bool random = sec.value("mode", "free") == "random";
  const auto Es = get_numbers(sec, "E", {3.0});
  const auto etas = get_numbers(sec, "eta", {random ? 0.1 : 0.0});
  const int axes = random ? cfg.geometry->axes() : cfg.symbol.nu();
  std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
  if (sec.contains("pairs")) {
    for (const auto& p : sec["pairs"]) pairs.emplace_back(p[0].get<std::vector<int>>(), p[1].get<std::vector<int>>());
  } else {
    pairs.emplace_back(std::vector<int>(static_cast<std::size_t>(axes), 0), std::vector<int>(static_cast<std::size_t>(axes), 0));
  }
  for (const auto& [n, m] : pairs)
    if (static_cast<int>(n.size()) != axes || static_cast<int>(m.size()) != axes)
      throw Error("dimension mismatch", "site coordinates must match the lattice dimension");

  struct Job {
    double E, eta;
  };
  std::vector<Job> jobs;
  for (double E : Es)
    for (double eta : etas) jobs.push_back({E, eta});
  std::vector<std::vector<cplx>> values(jobs.size());

  std::optional<SparseC> H;
  if (random) H = assemble_sparse(cfg.symbol, *cfg.geometry, sampled_or_zero(cfg, *cfg.geometry));
  parallel_for(jobs.size(), [&](std::size_t j) {
    const cplx z(jobs[j].E, jobs[j].eta);
    if (!random) {
      for (const auto& [n, m] : pairs) values[j].push_back(free_resolvent_kernel(cfg.symbol, z, n, m));
      return;
    }
    const GreenSolver solver(*H, z);
    std::map<std::size_t, std::vector<cplx>> columns;
    for (const auto& [n, m] : pairs) {
      const std::size_t mi = cfg.geometry->index(m);
      auto it = columns.find(mi);
      if (it == columns.end()) it = columns.emplace(mi, solver.column(mi)).first;
      values[j].push_back(it->second[cfg.geometry->index(n)]);
    }
  });

  CommandResult r;
  r.table.columns = {"E", "eta", "n", "m", "re", "im", "abs"};
  for (std::size_t j = 0; j < jobs.size(); ++j)
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const cplx g = values[j][p];
      r.table.add({jobs[j].E, jobs[j].eta, join_coords(pairs[p].first), join_coords(pairs[p].second), g.real(),
                   g.imag(), std::abs(g)});
    }
  r.summary["mode"] = random ? "random" : "free";
  return r;
}

CommandResult run_propagate(const ExperimentConfig& cfg) {
  const json& sec = cfg.section;
  const int grid = get_int(sec, "grid", 4096);
  std::vector<double> s_grid = get_grid(sec, "s", {});
  if (s_grid.empty())
    for (int i = 0; i <= 30; ++i) s_grid.push_back(5.0 + 2.5 * i);
  PropagationReport rep;
  if (get_bool(sec, "odd", false)) {
    Interval support{0.5, 1.2};
    if (sec.contains("support")) support = {sec["support"][0][0].get<double>(), sec["support"][0][1].get<double>()};
    rep = half_line_propagation(WavePacket::odd_bump(support, grid), s_grid);
  } else {
    rep = propagation_exponent(cfg.symbol, WavePacket::bump(cfg.symbol, supports_from(cfg, cfg.symbol), grid), s_grid);
  }
  CommandResult r;
  r.table.columns = {"s", "mass", "cumulative_integral"};
  double cumulative = 0.0;
  for (std::size_t i = 0; i < rep.s.size(); ++i) {
    if (i > 0) cumulative += 0.5 * (rep.mass[i] + rep.mass[i - 1]) * (rep.s[i] - rep.s[i - 1]);
    r.table.add({rep.s[i], rep.mass[i], cumulative});
  }
  r.summary = {{"slope", rep.slope},         {"intercept", rep.intercept}, {"ci_low", rep.ci_low},
               {"ci_high", rep.ci_high},     {"r_squared", rep.r_squared}, {"verdict", rep.verdict}};
  return r;
}

CommandResult run_cook(const ExperimentConfig& cfg) {
  const json& sec = cfg.section;
  CookOptions opt;
  opt.horizon = get_number(sec, "horizon", opt.horizon);
  opt.step = get_number(sec, "step", opt.step);
  opt.tolerance = get_number(sec, "tolerance", opt.tolerance);
  opt.doubling = get_bool(sec, "doubling", opt.doubling);
  const WavePacket packet = WavePacket::bump(cfg.symbol, supports_from(cfg, cfg.symbol), get_int(sec, "grid", 4096));
  const CookReport rep = cook_certificate(cfg.symbol, *cfg.envelope, *cfg.disorder, packet, opt);
  CommandResult r;
  r.table.columns = {"s", "integrand", "bound_tail", "bound_interior", "cumulative_integral"};
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const CookPoint& p = rep.points[i];
    r.table.add({p.s, p.integrand, p.bound_tail, p.bound_interior, rep.cumulative[i]});
  }
  r.summary = {{"verdict", rep.verdict},
               {"integral_T", rep.integral_T},
               {"integral_2T", rep.integral_2T},
               {"relative_change", rep.relative_change},
               {"tail_exponent", rep.tail_exponent}};
  json norms = json::array();
  for (const auto& [s, n] : rep.weighted_norms) norms.push_back({s, n});
  r.summary["weighted_norms"] = norms;
  if (!rep.integrable) {
    r.negative = true;
    r.message = "not integrable";
  }
  return r;
}

CommandResult run_asupp(const ExperimentConfig& cfg) {
  const json& sec = cfg.section;
  const Geometry geo = cfg.geometry ? *cfg.geometry : Geometry(GeometryKind::full, cfg.symbol.nu(), 1, Boundary::dirichlet);
  const double a = cfg.envelope->sup();
  const double lo = std::min(0.0, a * cfg.disorder->lower()) - 0.5;
  const double hi = std::max(0.0, a * cfg.disorder->upper()) + 0.5;
  std::vector<double> xs = get_grid(sec, "x", {});
  if (xs.empty())
    for (double x = lo; x <= hi + 1e-12; x += 0.05) xs.push_back(x);
  const ASuppScan scan = a_supp_scan(*cfg.envelope, *cfg.disorder, geo, xs, get_ints(sec, "k", {1, 2, 3}),
                                     get_numbers(sec, "eps", {0.1, 0.01}), get_int(sec, "cutoff", 64));
  CommandResult r;
  r.table.columns = {"x", "k", "eps", "sum_c1", "sum_c2", "sum_c4", "verdict", "confidence"};
  for (const ASuppRow& row : scan.rows)
    r.table.add({row.x, static_cast<long long>(row.k), row.eps, row.sums[0], row.sums[1], row.sums[2],
                 std::string(row.divergent ? "divergent" : "convergent"),
                 std::string(row.high_confidence ? "high" : "low")});
  json divergent = json::array();
  for (const ASuppPoint& p : scan.points)
    if (p.divergent) divergent.push_back(p.x);
  r.summary["divergent_x"] = divergent;
  return r;
}

CommandResult run_decouple(const ExperimentConfig& cfg) {
  const json& sec = cfg.section;
  std::vector<double> alphas = get_grid(sec, "alpha", {});
  if (alphas.empty())
    for (int i = 0; i <= 1000; ++i) alphas.push_back(-25.0 + 0.05 * i);
  CommandResult r;
  r.table.columns = {"kappa", "alpha", "ratio", "K_kappa", "pass"};
  bool all = true;
  json per = json::array();
  for (double kappa : get_numbers(sec, "kappa", {0.1, 0.2, 0.3})) {
    const DecouplingReport rep = verify_decoupling(*cfg.disorder, kappa, alphas, cfg.tau, cfg.q);
    for (const auto& row : rep.rows) r.table.add({kappa, row.alpha, row.ratio, rep.K_kappa, row.ratio <= rep.K_kappa});
    per.push_back({{"kappa", kappa}, {"max_ratio", rep.max_ratio}, {"K_kappa", rep.K_kappa}, {"pass", rep.pass}});
    all = all && rep.pass;
  }
  r.summary["kappa_max"] = kappa_bound(cfg.tau, cfg.q);
  r.summary["results"] = per;
  if (!all) {
    r.negative = true;
    r.message = "decoupling ratio exceeds K_kappa";
  }
  return r;
}

CommandResult run_threshold(const ExperimentConfig& cfg) {
  const json& sec = cfg.section;
  ThresholdOptions opt;
  opt.tau = cfg.tau;
  opt.q = cfg.q;
  opt.M = get_int(sec, "M", opt.M);
  opt.max_M = get_int(sec, "max_M", opt.max_M);
  const Geometry geo = cfg.geometry ? *cfg.geometry : Geometry(GeometryKind::full, cfg.symbol.nu(), 1, Boundary::dirichlet);
  const ThresholdReport rep = localization_threshold(cfg.symbol, *cfg.envelope, *cfg.disorder, cfg.s, *cfg.E_scan, geo, opt);
  CommandResult r;
  r.table.columns = {"E", "S", "K_times_S", "certified"};
  for (const auto& row : rep.rows) r.table.add({row.E, row.S, row.K_times_S, row.certified});
  r.summary = {{"s", rep.s},         {"kappa_max", rep.kappa_max}, {"K_s", rep.K_s},
               {"K", rep.K},         {"E0", rep.E0},               {"E_mu", rep.E_mu},
               {"closed_form", rep.closed_form_found ? json(rep.closed_form) : json(nullptr)}};
  return r;
}

CommandResult run_simonwolff(const ExperimentConfig& cfg) {
  const json& sec = cfg.section;
  const Geometry& geo = *cfg.geometry;
  const int count = get_int(sec, "realizations", 1);
  if (count < 1) throw Error("schema violation", "simonwolff.realizations must be positive");
  const double E = get_number(sec, "E", 0.0);
  const auto etas = get_numbers(sec, "eta", {0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001});
  const auto site = get_ints(sec, "site", std::vector<int>(static_cast<std::size_t>(geo.axes()), 0));
  std::vector<SimonWolffResult> results(static_cast<std::size_t>(count));
  parallel_for(results.size(), [&](std::size_t i) {
    results[i] = simon_wolff_sum(cfg.symbol, *cfg.envelope, *cfg.disorder, geo, cfg.seed + i, site, E, etas);
  });
  CommandResult r;
  r.table.columns = {"realization", "eta", "sum", "verdict"};
  std::map<std::string, int> tally;
  for (std::size_t i = 0; i < results.size(); ++i) {
    ++tally[results[i].verdict];
    for (std::size_t k = 0; k < results[i].eta.size(); ++k)
      r.table.add({static_cast<long long>(i), results[i].eta[k], results[i].sum[k], results[i].verdict});
  }
  r.summary["verdicts"] = tally;
  return r;
}

CommandResult run_weyl(const ExperimentConfig& cfg) {
  const json& sec = cfg.section;
  const double lambda = get_number(sec, "lambda", 1.0);
  double E = 0.0;
  if (sec.contains("E")) {
    E = get_number(sec, "E", 0.0);
  } else if (lambda != 0.0) {
    const AKEigenvalue ak = aronszajn_krein_eigenvalue(cfg.symbol, lambda);
    if (!ak.found) throw VerdictNegative("no eigenvalue", ak.note);
    E = ak.E;
  } else {
    const BandEdges b = band_edges(cfg.symbol);
    E = 0.5 * (b.lower + b.upper);
  }
  const PotentialField V = sample_potential(*cfg.envelope, *cfg.disorder, *cfg.geometry, cfg.seed);
  const WeylReport rep = weyl_residual(cfg.symbol, lambda, E, get_ints(sec, "l", {1, 2, 3, 4}), V);
  CommandResult r;
  r.table.columns = {"l", "alpha", "residual", "bound", "realized"};
  for (const WeylRow& row : rep.rows)
    r.table.add({static_cast<long long>(row.l), join_coords(row.alpha), row.realized ? row.residual : std::nan(""),
                 row.bound, row.realized});
  r.summary = {{"lambda", lambda}, {"E", E}};
  return r;
}

}  // namespace

CommandResult run_command(const ExperimentConfig& cfg) {
  static const std::map<std::string, CommandResult (*)(const ExperimentConfig&)> table{
      {"band", run_band},         {"spectrum", run_spectrum}, {"resolvent", run_resolvent},
      {"propagate", run_propagate}, {"cook", run_cook},       {"asupp", run_asupp},
      {"decouple", run_decouple}, {"threshold", run_threshold}, {"simonwolff", run_simonwolff},
      {"weyl", run_weyl}};
  auto it = table.find(cfg.command);
  if (it == table.end()) throw Error("schema violation", "unknown command \"" + cfg.command + "\"");
  return it->second(cfg);
}

int run_experiment(const RunOptions& options, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (options.format != "csv" && options.format != "json")
      throw Error("schema violation", "format must be csv or json");
    std::ifstream in(options.config_path);
    if (!in) throw Error("io error", "cannot read " + options.config_path);
    json document;
    try {
      document = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error("schema violation", std::string("malformed JSON: ") + e.what());
    }
    ExperimentConfig cfg = load_config(options.command, document);
    if (options.seed) cfg.seed = *options.seed;
    set_thread_count(std::max(1u, options.threads));

    const CommandResult result = run_command(cfg);

    const std::string out = options.out.empty() ? options.command + "." + options.format : options.out;
    const std::string body = options.format == "csv" ? to_csv(result.table) : to_json(result.table, result.summary);
    Manifest m;
    m.command = options.command;
    m.config_hash = sha256_hex(cfg.canonical.dump());
    m.seed = cfg.seed;
    m.format = options.format;
    m.output = out;
    m.output_hash = sha256_hex(body);
    m.threads = thread_count();
    m.summary = result.summary;
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(out, body);
    write_file(out + ".manifest.json", m.to_json().dump(2) + "\n");
    if (result.negative) {
      log << "verdict negative: " << result.message << "\n";
      return 2;
    }
    return 0;
  } catch (const VerdictNegative& e) {
    log << "verdict negative: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace alab
