#pragma once

// Tabular results, their CSV/JSON renderings and the run manifest.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace alab {

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);
std::string format_cell(const Cell& c);

// Header row, comma separated, "\n" line ends. Cells containing commas or
// quotes are quoted.
std::string to_csv(const Table& t);
// {"columns": [...], "rows": [[...]], "summary": {...}}
std::string to_json(const Table& t, const nlohmann::json& summary);

// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

struct Manifest {
  std::string command;
  std::string config_hash;  // SHA-256 of the canonical config dump
  std::uint64_t seed = 0;
  std::string format;
  std::string output;
  std::string output_hash;
  unsigned threads = 1;
  double wall_seconds = 0.0;
  nlohmann::json summary = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// Writes via a temporary file and rename; throws Error("io error") on failure.
void write_file(const std::string& path, const std::string& contents);

}  // namespace alab
