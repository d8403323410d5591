#include "alab/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "alab/error.hpp"

namespace alab {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error("schema violation", path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) fail(path, "unknown key \"" + key + "\"");
  }
}

const json& need(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing key \"") + key + "\"");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

std::vector<double> as_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> as_ints(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(static_cast<int>(as_integer(v[i], path + "[" + std::to_string(i) + "]")));
  return out;
}

std::vector<double> as_grid(const json& v, const std::string& path) {
  if (v.is_array()) return as_numbers(v, path);
  check_keys(v, path, {"min", "max", "step"});
  const double lo = as_number(need(v, path, "min"), path + ".min");
  const double hi = as_number(need(v, path, "max"), path + ".max");
  const double step = as_number(need(v, path, "step"), path + ".step");
  if (!(step > 0.0) || hi < lo) fail(path, "need min <= max and step > 0");
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 10'000'000) fail(path, "grid too long");
  std::vector<double> out;
  for (long long i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

enum class Kind { number, integer, boolean, numbers, integers, grid, string, intervals, pairs, number_or_numbers };

void check_value(const json& v, Kind kind, const std::string& path) {
  switch (kind) {
    case Kind::number: as_number(v, path); break;
    case Kind::integer: as_integer(v, path); break;
    case Kind::boolean:
      if (!v.is_boolean()) fail(path, "expected a boolean");
      break;
    case Kind::numbers: as_numbers(v, path); break;
    case Kind::integers: as_ints(v, path); break;
    case Kind::grid: as_grid(v, path); break;
    case Kind::string:
      if (!v.is_string()) fail(path, "expected a string");
      break;
    case Kind::intervals:
      if (!v.is_array() || v.empty()) fail(path, "expected an array of [lo, hi] pairs");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto p = as_numbers(v[i], path + "[" + std::to_string(i) + "]");
        if (p.size() != 2 || !(p[0] < p[1])) fail(path, "each interval needs lo < hi");
      }
      break;
    case Kind::pairs:
      if (!v.is_array()) fail(path, "expected an array of [n, m] site pairs");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != 2) fail(p, "expected [n, m]");
        as_ints(v[i][0], p + "[0]");
        as_ints(v[i][1], p + "[1]");
      }
      break;
    case Kind::number_or_numbers:
      if (v.is_array()) as_numbers(v, path);
      else as_number(v, path);
      break;
  }
}

using SectionSpec = std::map<std::string, Kind>;

const std::map<std::string, SectionSpec>& section_specs() {
  static const std::map<std::string, SectionSpec> specs{
      {"band", {}},
      {"spectrum",
       {{"vectors", Kind::boolean},
        {"dense_limit", Kind::integer},
        {"window_center", Kind::number},
        {"window_count", Kind::integer},
        {"ratio_window", Kind::numbers},
        {"zero_potential", Kind::boolean},
        {"rank_one_lambda", Kind::number},
        {"krylov_pairs", Kind::pairs},
        {"krylov_dim", Kind::integer}}},
      {"resolvent",
       {{"mode", Kind::string}, {"E", Kind::number_or_numbers}, {"eta", Kind::number_or_numbers}, {"pairs", Kind::pairs}}},
      {"propagate", {{"grid", Kind::integer}, {"support", Kind::intervals}, {"s", Kind::grid}, {"odd", Kind::boolean}}},
      {"cook",
       {{"grid", Kind::integer},
        {"support", Kind::intervals},
        {"horizon", Kind::number},
        {"step", Kind::number},
        {"tolerance", Kind::number},
        {"doubling", Kind::boolean}}},
      {"asupp", {{"x", Kind::grid}, {"k", Kind::integers}, {"eps", Kind::numbers}, {"cutoff", Kind::integer}}},
      {"decouple", {{"kappa", Kind::number_or_numbers}, {"alpha", Kind::grid}}},
      {"threshold", {{"M", Kind::integer}, {"max_M", Kind::integer}}},
      {"simonwolff",
       {{"realizations", Kind::integer}, {"E", Kind::number}, {"eta", Kind::numbers}, {"site", Kind::integers}}},
      {"weyl", {{"lambda", Kind::number}, {"E", Kind::number}, {"l", Kind::integers}}},
  };
  return specs;
}

void check_section(const std::string& name, const json& j) {
  const std::string path = "$." + name;
  require_object(j, path);
  const SectionSpec& spec = section_specs().at(name);
  for (const auto& [key, value] : j.items()) {
    auto it = spec.find(key);
    if (it == spec.end()) fail(path, "unknown key \"" + key + "\"");
    check_value(value, it->second, path + "." + key);
  }
  if (name == "resolvent" && j.contains("mode")) {
    const auto mode = j["mode"].get<std::string>();
    if (mode != "free" && mode != "random") fail(path + ".mode", "expected \"free\" or \"random\"");
  }
  if (name == "spectrum" && j.contains("ratio_window") && j["ratio_window"].size() != 2)
    fail(path + ".ratio_window", "expected [lo, hi]");
}

AxisSymbol parse_axis(const json& j, const std::string& path) {
  require_object(j, path);
  if (j.contains("cos_coeffs")) {
    check_keys(j, path, {"cos_coeffs"});
    return AxisSymbol::cosine(as_numbers(j["cos_coeffs"], path + ".cos_coeffs"));
  }
  check_keys(j, path, {"table", "period_samples"});
  auto table = as_numbers(need(j, path, "table"), path + ".table");
  const auto ps = as_integer(need(j, path, "period_samples"), path + ".period_samples");
  if (ps < 2) fail(path + ".period_samples", "must be at least 2");
  return AxisSymbol::tabulated(std::move(table), static_cast<int>(ps));
}

template <class F>
auto wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.reason() == "schema violation") throw;
    fail(path, e.what());
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

}  // namespace

Symbol parse_symbol(const json& j) {
  return wrap("$.symbol", [&] {
    check_keys(j, "$.symbol", {"nu", "axes"});
    const auto nu = as_integer(need(j, "$.symbol", "nu"), "$.symbol.nu");
    if (nu < 1 || nu > 6) fail("$.symbol.nu", "expected 1..6");
    const json& axes = need(j, "$.symbol", "axes");
    if (!axes.is_array() || (axes.size() != 1 && axes.size() != static_cast<std::size_t>(nu)))
      fail("$.symbol.axes", "expected one axis or nu axes");
    std::vector<AxisSymbol> parsed;
    for (long long g = 0; g < nu; ++g) {
      const std::size_t src = axes.size() == 1 ? 0 : static_cast<std::size_t>(g);
      parsed.push_back(parse_axis(axes[src], "$.symbol.axes[" + std::to_string(src) + "]"));
    }
    return Symbol(std::move(parsed));
  });
}

Geometry parse_geometry(const json& j, int nu) {
  return wrap("$.geometry", [&] {
    check_keys(j, "$.geometry", {"kind", "L", "bc"});
    const json& kind = need(j, "$.geometry", "kind");
    if (!kind.is_string() || (kind != "full" && kind != "half")) fail("$.geometry.kind", "expected \"full\" or \"half\"");
    const auto L = as_integer(need(j, "$.geometry", "L"), "$.geometry.L");
    if (L < 1) fail("$.geometry.L", "must be positive");
    Boundary bc = Boundary::dirichlet;
    if (j.contains("bc")) {
      if (j["bc"] == "periodic") bc = Boundary::periodic;
      else if (j["bc"] != "dirichlet") fail("$.geometry.bc", "expected \"periodic\" or \"dirichlet\"");
    }
    return Geometry(kind == "full" ? GeometryKind::full : GeometryKind::half, nu, static_cast<int>(L), bc);
  });
}

Envelope parse_envelope(const json& j) {
  return wrap("$.envelope", [&]() -> Envelope {
    const std::string p = "$.envelope";
    require_object(j, p);
    const json& kind = need(j, p, "kind");
    if (kind == "constant") {
      check_keys(j, p, {"kind", "lambda"});
      return Envelope::constant(as_number(need(j, p, "lambda"), p + ".lambda"));
    }
    if (kind == "axis_power") {
      check_keys(j, p, {"kind", "alpha"});
      return Envelope::axis_power(as_number(need(j, p, "alpha"), p + ".alpha"));
    }
    if (kind == "product_power") {
      check_keys(j, p, {"kind", "alphas"});
      return Envelope::product_power(as_numbers(need(j, p, "alphas"), p + ".alphas"));
    }
    if (kind == "surface_strip") {
      check_keys(j, p, {"kind", "N"});
      return Envelope::surface_strip(static_cast<int>(as_integer(need(j, p, "N"), p + ".N")));
    }
    if (kind == "table") {
      check_keys(j, p, {"kind", "values"});
      return Envelope::table(as_numbers(need(j, p, "values"), p + ".values"));
    }
    fail(p + ".kind", "unknown envelope kind");
  });
}

Disorder parse_disorder(const json& j, std::uint64_t* seed) {
  return wrap("$.disorder", [&]() -> Disorder {
    const std::string p = "$.disorder";
    require_object(j, p);
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
        fail(p + ".seed", "expected an unsigned integer");
      if (seed != nullptr) *seed = j["seed"].get<std::uint64_t>();
    }
    const json& kind = need(j, p, "kind");
    if (kind == "uniform") {
      check_keys(j, p, {"kind", "a", "b", "seed"});
      return Disorder::uniform(as_number(need(j, p, "a"), p + ".a"), as_number(need(j, p, "b"), p + ".b"));
    }
    if (kind == "two_block") {
      check_keys(j, p, {"kind", "eps", "delta", "R", "seed"});
      const double R = as_number(need(j, p, "R"), p + ".R");
      if (!j.contains("eps") && !j.contains("delta")) return example_measure(R);
      return Disorder::two_block(as_number(need(j, p, "eps"), p + ".eps"),
                                 as_number(need(j, p, "delta"), p + ".delta"), R);
    }
    if (kind == "density_table") {
      check_keys(j, p, {"kind", "x", "f", "seed"});
      return Disorder::density_table(as_numbers(need(j, p, "x"), p + ".x"), as_numbers(need(j, p, "f"), p + ".f"));
    }
    fail(p + ".kind", "unknown disorder kind");
  });
}

ExperimentConfig load_config(const std::string& command, const json& document) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end())
    throw Error("schema violation", "unknown command \"" + command + "\"");
  require_object(document, "$");
  for (const auto& [key, value] : document.items()) {
    static const std::set<std::string> top{"symbol", "geometry", "envelope", "disorder", "s", "tau", "q", "E_scan"};
    if (top.count(key) == 0 && section_specs().count(key) == 0) fail("$", "unknown key \"" + key + "\"");
    if (section_specs().count(key) != 0) check_section(key, value);
  }

  ExperimentConfig cfg;
  cfg.command = command;
  cfg.canonical = document;
  cfg.symbol = parse_symbol(need(document, "$", "symbol"));
  if (document.contains("geometry")) cfg.geometry = parse_geometry(document["geometry"], cfg.symbol.nu());
  if (document.contains("envelope")) cfg.envelope = parse_envelope(document["envelope"]);
  if (document.contains("disorder")) cfg.disorder = parse_disorder(document["disorder"], &cfg.seed);
  if (document.contains("s")) cfg.s = as_number(document["s"], "$.s");
  if (document.contains("tau")) cfg.tau = as_number(document["tau"], "$.tau");
  if (document.contains("q")) {
    const json& q = document["q"];
    if (q.is_string()) {
      if (q != "inf") fail("$.q", "expected a number or \"inf\"");
      cfg.q = kInf;
    } else {
      cfg.q = as_number(q, "$.q");
    }
  }
  if (document.contains("E_scan")) {
    const json& e = document["E_scan"];
    check_keys(e, "$.E_scan", {"min", "max", "step"});
    EnergyScan scan{as_number(need(e, "$.E_scan", "min"), "$.E_scan.min"),
                    as_number(need(e, "$.E_scan", "max"), "$.E_scan.max"),
                    as_number(need(e, "$.E_scan", "step"), "$.E_scan.step")};
    if (!(scan.step > 0.0) || scan.max < scan.min || scan.min < 0.0)
      fail("$.E_scan", "need 0 <= min <= max and step > 0");
    cfg.E_scan = scan;
  }
  if (document.contains(command)) cfg.section = document[command];

  auto require = [&](bool present, const char* key) {
    if (!present) fail("$", std::string("command \"") + command + "\" needs \"" + key + "\"");
  };
  const bool zero_potential = command == "spectrum" && get_bool(cfg.section, "zero_potential", false);
  const bool random_resolvent = command == "resolvent" && cfg.section.value("mode", "free") == "random";
  if (command == "spectrum" || random_resolvent || command == "simonwolff" || command == "weyl")
    require(cfg.geometry.has_value(), "geometry");
  if ((command == "spectrum" && !zero_potential) || random_resolvent || command == "simonwolff" ||
      command == "weyl" || command == "cook" || command == "asupp" || command == "threshold") {
    require(cfg.envelope.has_value(), "envelope");
    require(cfg.disorder.has_value(), "disorder");
  }
  if (command == "decouple") require(cfg.disorder.has_value(), "disorder");
  if (command == "threshold") require(cfg.E_scan.has_value(), "E_scan");
  return cfg;
}

double get_number(const json& section, const std::string& key, double fallback) {
  return section.contains(key) ? as_number(section[key], key) : fallback;
}

int get_int(const json& section, const std::string& key, int fallback) {
  return section.contains(key) ? static_cast<int>(as_integer(section[key], key)) : fallback;
}

bool get_bool(const json& section, const std::string& key, bool fallback) {
  if (!section.contains(key)) return fallback;
  if (!section[key].is_boolean()) fail(key, "expected a boolean");
  return section[key].get<bool>();
}

std::vector<double> get_numbers(const json& section, const std::string& key, std::vector<double> fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section[key];
  return v.is_array() ? as_numbers(v, key) : std::vector<double>{as_number(v, key)};
}

std::vector<int> get_ints(const json& section, const std::string& key, std::vector<int> fallback) {
  return section.contains(key) ? as_ints(section[key], key) : fallback;
}

std::vector<double> get_grid(const json& section, const std::string& key, std::vector<double> fallback) {
  return section.contains(key) ? as_grid(section[key], key) : fallback;
}

}  // namespace alab
