#pragma once

// Experiment configuration: JSON parsed into library objects and validated
// before any computation. Unknown keys are rejected everywhere.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "alab/disorder.hpp"
#include "alab/envelope.hpp"
#include "alab/fm_certificate.hpp"
#include "alab/geometry.hpp"
#include "alab/symbol.hpp"

namespace alab {

using json = nlohmann::json;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"band",   "spectrum", "resolvent", "propagate",  "cook",
                                              "asupp",  "decouple", "threshold", "simonwolff", "weyl"};
  return names;
}

struct ExperimentConfig {
  std::string command;
  json canonical;  // the validated input, keys sorted
  Symbol symbol;
  std::optional<Geometry> geometry;
  std::optional<Envelope> envelope;
  std::optional<Disorder> disorder;
  std::uint64_t seed = 0;
  double s = 0.3;
  double tau = 1.0;
  double q = kInf;
  std::optional<EnergyScan> E_scan;
  json section = json::object();  // the command's own block, defaults not filled
};

// All failures are Error("schema violation", <json path and problem>).
Symbol parse_symbol(const json& j);
Geometry parse_geometry(const json& j, int nu);
Envelope parse_envelope(const json& j);
Disorder parse_disorder(const json& j, std::uint64_t* seed = nullptr);

// Validates the whole document, including the blocks of every command present,
// and checks that the selected command has what it needs.
ExperimentConfig load_config(const std::string& command, const json& document);

// Typed access to a command block with defaults; throws "schema violation".
double get_number(const json& section, const std::string& key, double fallback);
int get_int(const json& section, const std::string& key, int fallback);
bool get_bool(const json& section, const std::string& key, bool fallback);
std::vector<double> get_numbers(const json& section, const std::string& key, std::vector<double> fallback);
std::vector<int> get_ints(const json& section, const std::string& key, std::vector<int> fallback);
// {"min", "max", "step"} or an explicit list.
std::vector<double> get_grid(const json& section, const std::string& key, std::vector<double> fallback);

}  // namespace alab
