#pragma once

#include "sqbath/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace sqbath {

enum class Command {
  SingleMode,
  TwoMode,
  Evolve,
  EpScan,
  PurityScan,
  EntropyScan,
};

std::string to_string(Command command);
Command command_from_string(const std::string& name);

enum class OutputFormat { Csv, Json };

std::string to_string(OutputFormat format);
OutputFormat format_from_string(const std::string& name);

/// Uniform 1-D parameter grid. spacing "linear" or "log" (log requires
/// 0 < min <= max).
struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  std::string spacing = "linear";

  std::vector<double> values() const;
  void validate(const std::string& key) const;
};

/// Solver and classifier tolerances, all > 0. Defaults are the documented
/// ones; every value can be overridden per run.
struct Tolerances {
  double im_tol = 1e-9;
  double integrator_tol = 1e-10;
  double ep_tol = 1e-10;
  double gap_tolerance = 1e-6;
  double cond_degenerate = 1e8;
  double stability_threshold = 1e-12;

  void validate() const;
};

struct OutputSpec {
  std::string path;
  OutputFormat format = OutputFormat::Csv;
};

/// Fully-resolved run description. `echo` holds the resolved document
/// (defaults filled) embedded into every output so a run can be reproduced
/// exactly.
struct RunConfig {
  Command command = Command::SingleMode;
  SystemSpec system;
  DiffusionConvention convention = DiffusionConvention::ConsistencyCorrected;
  Tolerances tolerances;
  OutputSpec output;

  // ep-scan
  GridSpec m1_grid;
  GridSpec m2_grid;
  std::vector<double> gammas;

  // purity-scan
  GridSpec r_grid;

  // entropy-scan
  GridSpec m_grid;
  GridSpec dm_grid{0.0, 0.0, 1, "linear"};

  // evolve
  double t_max = 10.0;
  int t_count = 101;

  nlohmann::json echo;

  std::vector<double> time_grid() const;
};

/// Parses and validates a JSON run configuration. Accepts either the
/// structured form ({"command", "system": {...}, "grids": {...},
/// "tolerances": {...}, "diffusion_convention", "output": {...}}) or the
/// flat single-mode shorthand ({"omega", "gamma", "N", "M", ...}). Unknown
/// keys, type mismatches, and out-of-range values raise ValidationError
/// naming the key and the constraint.
RunConfig parse_config(const nlohmann::json& doc);

/// Parses the text as JSON, then as a config.
RunConfig parse_config_text(const std::string& text);

/// Reads the file, then parses it.
RunConfig load_config_file(const std::string& path);

/// Applies one "dotted.path=value" override onto a JSON document (value
/// parsed as JSON when possible, else kept as a string). Integer segments
/// index arrays.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace sqbath
