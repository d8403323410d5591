#pragma once

// Subcommand dispatch for the anderson-lab tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "alab/config.hpp"
#include "alab/output.hpp"

namespace alab {

struct CommandResult {
  Table table;
  nlohmann::json summary = nlohmann::json::object();
  bool negative = false;  // finished, but the verdict is negative
  std::string message;
};

// Runs one validated command. Library errors propagate.
CommandResult run_command(const ExperimentConfig& cfg);

struct RunOptions {
  std::string command;
  std::string config_path;
  std::string out;           // default "<command>.<format>"
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

// Reads and validates the config, runs, writes the output and
// "<out>.manifest.json". Returns 0 on success, 2 on a negative verdict, 1 on
// any error; nothing is written when validation or the computation fails.
int run_experiment(const RunOptions& options, std::ostream& log);

}  // namespace alab
