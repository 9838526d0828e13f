#include "sqbath/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sqbath/version.hpp"

namespace sqbath {

namespace {

nlohmann::json cell_to_json(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    const double v = std::get<double>(cell);
    if (std::isnan(v)) return nullptr;  // JSON has no NaN literal
    return v;
  }
  if (std::holds_alternative<long long>(cell)) {
    return std::get<long long>(cell);
  }
  return std::get<std::string>(cell);
}

std::string cell_to_csv(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    return format_double(std::get<double>(cell));
  }
  if (std::holds_alternative<long long>(cell)) {
    return std::to_string(std::get<long long>(cell));
  }
  return std::get<std::string>(cell);
}

void append_csv_table(std::ostringstream& out,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<Cell>>& rows) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << ',';
    out << columns[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << cell_to_csv(row[i]);
    }
    out << '\n';
  }
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value,
                    std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

std::string render_csv(const ScanTable& table, const OutputMetadata& meta) {
  std::ostringstream out;
  out << "# generator: " << kToolName << ' ' << kVersion << '\n';
  out << "# command: " << meta.command << '\n';
  out << "# convention: " << meta.convention << '\n';
  out << "# config: " << meta.config_echo.dump() << '\n';
  out << "# duration_ms: " << format_double(meta.duration_ms) << '\n';
  for (const std::string& finding : meta.findings) {
    out << "# finding: " << finding << '\n';
  }
  append_csv_table(out, table.columns, table.rows);
  for (const Section& section : table.sections) {
    out << "# section: " << section.name << '\n';
    append_csv_table(out, section.columns, section.rows);
  }
  return out.str();
}

std::string render_json(const ScanTable& table, const OutputMetadata& meta) {
  nlohmann::json doc;
  doc["metadata"] = nlohmann::json{
      {"generator", std::string(kToolName) + " " + kVersion},
      {"command", meta.command},
      {"convention", meta.convention},
      {"config", meta.config_echo},
      {"duration_ms", meta.duration_ms},
      {"findings", meta.findings}};
  doc["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json jrow = nlohmann::json::array();
    for (const Cell& cell : row) jrow.push_back(cell_to_json(cell));
    rows.push_back(std::move(jrow));
  }
  doc["rows"] = rows;
  if (!table.sections.empty()) {
    nlohmann::json sections = nlohmann::json::object();
    for (const Section& section : table.sections) {
      nlohmann::json body;
      body["columns"] = section.columns;
      nlohmann::json srows = nlohmann::json::array();
      for (const auto& row : section.rows) {
        nlohmann::json jrow = nlohmann::json::array();
        for (const Cell& cell : row) jrow.push_back(cell_to_json(cell));
        srows.push_back(std::move(jrow));
      }
      body["rows"] = srows;
      sections[section.name] = body;
    }
    doc["sections"] = sections;
  }
  return doc.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("output: cannot open \"" + path + "\" for writing");
  }
  out << text;
  if (!out) {
    throw IoError("output: write to \"" + path + "\" failed");
  }
}

}  // namespace sqbath
