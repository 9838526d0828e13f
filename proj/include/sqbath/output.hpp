#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sqbath/types.hpp"

namespace sqbath {

// A single table cell: double (formatted with 17 significant digits),
// integer (exact), or string (quoted in JSON, raw in CSV).
using Cell = std::variant<double, long long, std::string>;

struct Section {
  std::string name;                     // e.g. "contours"
  std::vector<std::string> columns;     // header row
  std::vector<std::vector<Cell>> rows;  // row-major data
};

// One scan result: a primary table plus optional named secondary sections.
struct ScanTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Section> sections;
};

struct OutputMetadata {
  std::string command;
  std::string convention;
  nlohmann::json config_echo;          // fully-resolved configuration
  std::vector<std::string> findings;   // free-form diagnostic notes
  double duration_ms = 0.0;
};

// Shortest round-trippable decimal: 17 significant digits, general format.
std::string format_double(double value);

// Render the table to CSV ('#'-prefixed metadata lines, then header + rows;
// secondary sections follow after a "# section: <name>" marker line).
std::string render_csv(const ScanTable& table, const OutputMetadata& meta);

// Render the same content as a JSON document.
std::string render_json(const ScanTable& table, const OutputMetadata& meta);

// Write text to a file, throwing IoError on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace sqbath
