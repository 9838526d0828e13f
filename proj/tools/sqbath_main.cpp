#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqbath/config.hpp"
#include "sqbath/output.hpp"
#include "sqbath/run.hpp"
#include "sqbath/version.hpp"

namespace {

int emit_error(const std::string& type, const std::string& message) {
  nlohmann::json record;
  record["error"] = nlohmann::json{{"type", type}, {"message", message}};
  std::cerr << record.dump() << std::endl;
  if (type == "validation") return 2;
  if (type == "numerics") return 3;
  if (type == "io") return 4;
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(sqbath::kToolName) +
               ": steady states, spectra, and entropy scans of bosonic "
               "modes coupled to squeezed thermal reservoirs"};
  app.allow_extras();
  app.set_version_flag("--version", std::string(sqbath::kToolName) + " " +
                                        sqbath::kVersion);

  std::string command;
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string convention;
  app.add_option("command", command,
                 "single-mode | two-mode | evolve | ep-scan | purity-scan | "
                 "entropy-scan")
      ->required();
  app.add_option("--config", config_path, "Path to a JSON run configuration")
      ->required();
  app.add_option("--out", out_path, "Output file path");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--convention", convention, "Diffusion convention")
      ->check(CLI::IsMember({"paper", "corrected"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    sqbath::command_from_string(command);  // reject unknown commands early

    std::ifstream in(config_path);
    if (!in) {
      throw sqbath::IoError("config: cannot open file \"" + config_path +
                            "\"");
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw sqbath::ValidationError(std::string("config: invalid JSON: ") +
                                    e.what());
    }

    if (doc.contains("command") && doc["command"].is_string() &&
        doc["command"].get<std::string>() != command) {
      throw sqbath::ValidationError(
          "command: config file says \"" +
          doc["command"].get<std::string>() +
          "\" but the command line says \"" + command + "\"");
    }
    doc["command"] = command;
    if (!convention.empty()) doc["diffusion_convention"] = convention;
    if (!out_path.empty()) doc["output"]["path"] = out_path;
    if (!format.empty()) doc["output"]["format"] = format;

    for (const std::string& extra : app.remaining()) {
      if (!extra.empty() && extra.front() == '-') {
        throw sqbath::ValidationError("unknown option \"" + extra + "\"");
      }
      sqbath::apply_override(doc, extra);
    }

    const sqbath::RunConfig config = sqbath::parse_config(doc);

    const auto start = std::chrono::steady_clock::now();
    const sqbath::RunOutput result = sqbath::run_command(config);
    const auto stop = std::chrono::steady_clock::now();

    sqbath::OutputMetadata meta;
    meta.command = sqbath::to_string(config.command);
    meta.convention = sqbath::to_string(config.convention);
    meta.config_echo = config.echo;
    meta.findings = result.findings;
    meta.duration_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();

    std::string path = config.output.path;
    if (path.empty()) {
      path = sqbath::to_string(config.command) +
             (config.output.format == sqbath::OutputFormat::Csv ? ".csv"
                                                                : ".json");
    }
    const std::string text =
        config.output.format == sqbath::OutputFormat::Csv
            ? sqbath::render_csv(result.table, meta)
            : sqbath::render_json(result.table, meta);
    sqbath::write_file(path, text);

    std::cout << "wrote " << path << " (" << result.table.rows.size()
              << " rows";
    for (const sqbath::Section& section : result.table.sections) {
      std::cout << ", " << section.rows.size() << " " << section.name;
    }
    std::cout << ")" << std::endl;
    for (const std::string& finding : result.findings) {
      std::cout << "finding: " << finding << std::endl;
    }
    if (result.flagged_failures > 0) {
      std::cout << result.flagged_failures
                << " scan point(s) failed; see findings" << std::endl;
      return 1;
    }
    return 0;
  } catch (const sqbath::ValidationError& e) {
    return emit_error("validation", e.what());
  } catch (const sqbath::NumericsError& e) {
    return emit_error("numerics", e.what());
  } catch (const sqbath::IoError& e) {
    return emit_error("io", e.what());
  } catch (const std::exception& e) {
    return emit_error("internal", e.what());
  }
}
