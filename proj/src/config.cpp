#include "sqbath/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sqbath {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

[[noreturn]] void fail(const std::string& key, const std::string& constraint) {
  throw ValidationError(key + ": " + constraint);
}

void check_known_keys(const json& obj, const std::string& prefix,
                      const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      fail(prefix.empty() ? item.key() : prefix + "." + item.key(),
           "unknown key");
    }
  }
}

const json& expect_object(const json& j, const std::string& key) {
  if (!j.is_object()) fail(key, "must be an object");
  return j;
}

double expect_number(const json& j, const std::string& key) {
  if (!j.is_number()) fail(key, "must be a number");
  return j.get<double>();
}

int expect_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail(key, "must be an integer");
  return j.get<int>();
}

std::string expect_string(const json& j, const std::string& key) {
  if (!j.is_string()) fail(key, "must be a string");
  return j.get<std::string>();
}

Complex parse_complex(const json& j, const std::string& key) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array()) {
    if (j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      fail(key, "complex values are [re, im] number pairs");
    }
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  if (j.is_object()) {
    check_known_keys(j, key, {"re", "im"});
    double re = 0.0;
    double im = 0.0;
    if (j.contains("re")) re = expect_number(j["re"], key + ".re");
    if (j.contains("im")) im = expect_number(j["im"], key + ".im");
    return Complex(re, im);
  }
  fail(key, "must be a number, [re, im] pair, or {re, im} object");
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

GridSpec parse_grid(const json& j, const std::string& key) {
  expect_object(j, key);
  check_known_keys(j, key, {"min", "max", "count", "spacing"});
  GridSpec grid;
  if (!j.contains("min")) fail(key + ".min", "required");
  if (!j.contains("max")) fail(key + ".max", "required");
  if (!j.contains("count")) fail(key + ".count", "required");
  grid.min = expect_number(j["min"], key + ".min");
  grid.max = expect_number(j["max"], key + ".max");
  grid.count = expect_int(j["count"], key + ".count");
  if (j.contains("spacing")) {
    grid.spacing = expect_string(j["spacing"], key + ".spacing");
  }
  grid.validate(key);
  return grid;
}

json grid_to_json(const GridSpec& grid) {
  return json{{"min", grid.min},
              {"max", grid.max},
              {"count", grid.count},
              {"spacing", grid.spacing}};
}

std::vector<double> parse_gamma_list(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) fail(key, "must be a non-empty array");
  std::vector<double> gammas;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const double g =
        expect_number(j[i], key + "[" + std::to_string(i) + "]");
    if (!(g > 0.0)) {
      fail(key + "[" + std::to_string(i) + "]",
           "must be > 0, got " + format_double(g));
    }
    gammas.push_back(g);
  }
  return gammas;
}

SystemSpec parse_system(const json& j) {
  expect_object(j, "system");
  check_known_keys(j, "system", {"modes", "J", "baths"});
  if (!j.contains("modes")) fail("system.modes", "required");
  if (!j.contains("baths")) fail("system.baths", "required");
  if (!j["modes"].is_array()) fail("system.modes", "must be an array");
  if (!j["baths"].is_array()) fail("system.baths", "must be an array");

  SystemSpec spec;
  for (std::size_t i = 0; i < j["modes"].size(); ++i) {
    const std::string key = "system.modes[" + std::to_string(i) + "]";
    const json& m = j["modes"][i];
    expect_object(m, key);
    check_known_keys(m, key, {"omega", "gamma"});
    if (!m.contains("omega")) fail(key + ".omega", "required");
    if (!m.contains("gamma")) fail(key + ".gamma", "required");
    ModeSpec mode;
    mode.omega = expect_number(m["omega"], key + ".omega");
    mode.gamma = expect_number(m["gamma"], key + ".gamma");
    if (!(mode.omega > 0.0)) {
      fail(key + ".omega", "must be > 0, got " + format_double(mode.omega));
    }
    if (!(mode.gamma > 0.0)) {
      fail(key + ".gamma", "must be > 0, got " + format_double(mode.gamma));
    }
    spec.modes.push_back(mode);
  }
  for (std::size_t i = 0; i < j["baths"].size(); ++i) {
    const std::string key = "system.baths[" + std::to_string(i) + "]";
    const json& b = j["baths"][i];
    expect_object(b, key);
    check_known_keys(b, key, {"N", "M"});
    if (!b.contains("N")) fail(key + ".N", "required");
    BathMoments bath;
    bath.N = expect_number(b["N"], key + ".N");
    if (!(bath.N >= 0.0)) {
      fail(key + ".N", "must be >= 0, got " + format_double(bath.N));
    }
    if (b.contains("M")) bath.M = parse_complex(b["M"], key + ".M");
    spec.baths.push_back(bath);
  }
  if (j.contains("J")) spec.J = expect_number(j["J"], "system.J");

  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("system.") + e.what());
  }
  return spec;
}

Tolerances parse_tolerances(const json& j) {
  expect_object(j, "tolerances");
  check_known_keys(j, "tolerances",
                   {"im_tol", "integrator_tol", "ep_tol", "gap_tolerance",
                    "cond_degenerate", "stability_threshold"});
  Tolerances tol;
  const auto read = [&](const char* name, double& slot) {
    if (j.contains(name)) {
      slot = expect_number(j[name], std::string("tolerances.") + name);
    }
  };
  read("im_tol", tol.im_tol);
  read("integrator_tol", tol.integrator_tol);
  read("ep_tol", tol.ep_tol);
  read("gap_tolerance", tol.gap_tolerance);
  read("cond_degenerate", tol.cond_degenerate);
  read("stability_threshold", tol.stability_threshold);
  tol.validate();
  return tol;
}

OutputSpec parse_output(const json& j) {
  expect_object(j, "output");
  check_known_keys(j, "output", {"path", "format"});
  OutputSpec out;
  if (j.contains("path")) out.path = expect_string(j["path"], "output.path");
  if (j.contains("format")) {
    out.format =
        format_from_string(expect_string(j["format"], "output.format"));
  }
  return out;
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::SingleMode:
      return "single-mode";
    case Command::TwoMode:
      return "two-mode";
    case Command::Evolve:
      return "evolve";
    case Command::EpScan:
      return "ep-scan";
    case Command::PurityScan:
      return "purity-scan";
    case Command::EntropyScan:
      return "entropy-scan";
  }
  return "single-mode";
}

Command command_from_string(const std::string& name) {
  if (name == "single-mode") return Command::SingleMode;
  if (name == "two-mode") return Command::TwoMode;
  if (name == "evolve") return Command::Evolve;
  if (name == "ep-scan") return Command::EpScan;
  if (name == "purity-scan") return Command::PurityScan;
  if (name == "entropy-scan") return Command::EntropyScan;
  throw ValidationError(
      "command: must be one of single-mode, two-mode, evolve, ep-scan, "
      "purity-scan, entropy-scan; got \"" +
      name + "\"");
}

std::string to_string(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "json";
}

OutputFormat format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ValidationError("output.format: must be \"csv\" or \"json\", got \"" +
                        name + "\"");
}

void GridSpec::validate(const std::string& key) const {
  if (!std::isfinite(min) || !std::isfinite(max)) {
    fail(key, "min and max must be finite");
  }
  if (count < 1) {
    fail(key + ".count", "must be >= 1, got " + std::to_string(count));
  }
  if (!(min <= max)) {
    fail(key, "min must be <= max, got [" + format_double(min) + ", " +
                  format_double(max) + "]");
  }
  if (spacing != "linear" && spacing != "log") {
    fail(key + ".spacing", "must be \"linear\" or \"log\", got \"" + spacing +
                               "\"");
  }
  if (spacing == "log" && !(min > 0.0)) {
    fail(key, "log spacing requires min > 0, got " + format_double(min));
  }
}

std::vector<double> GridSpec::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(min);
    return out;
  }
  if (spacing == "log") {
    const double lo = std::log(min);
    const double hi = std::log(max);
    for (int k = 0; k < count; ++k) {
      out.push_back(std::exp(lo + (hi - lo) * k / (count - 1)));
    }
  } else {
    for (int k = 0; k < count; ++k) {
      out.push_back(min + (max - min) * k / (count - 1));
    }
  }
  return out;
}

void Tolerances::validate() const {
  const auto positive = [](const char* name, double v) {
    if (!(v > 0.0)) {
      throw ValidationError(std::string("tolerances.") + name +
                            ": must be > 0, got " + format_double(v));
    }
  };
  positive("im_tol", im_tol);
  positive("integrator_tol", integrator_tol);
  positive("ep_tol", ep_tol);
  positive("gap_tolerance", gap_tolerance);
  positive("cond_degenerate", cond_degenerate);
  positive("stability_threshold", stability_threshold);
}

std::vector<double> RunConfig::time_grid() const {
  std::vector<double> times;
  if (t_count == 1) {
    times.push_back(t_max);
    return times;
  }
  times.reserve(static_cast<std::size_t>(t_count));
  for (int k = 0; k < t_count; ++k) {
    times.push_back(t_max * k / (t_count - 1));
  }
  return times;
}

RunConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw ValidationError("config: document must be a JSON object");
  }

  const bool flat = doc.contains("omega") || doc.contains("gamma") ||
                    doc.contains("N") || doc.contains("M");
  if (flat && doc.contains("system")) {
    throw ValidationError(
        "config: use either the flat single-mode keys (omega, gamma, N, M) "
        "or a structured \"system\", not both");
  }

  json resolved = doc;
  if (flat) {
    check_known_keys(doc, "", {"omega", "gamma", "N", "M", "command", "grids",
                               "tolerances", "diffusion_convention",
                               "output"});
    json system;
    json mode;
    if (!doc.contains("omega")) fail("omega", "required");
    if (!doc.contains("gamma")) fail("gamma", "required");
    if (!doc.contains("N")) fail("N", "required");
    const double omega = expect_number(doc["omega"], "omega");
    const double gamma = expect_number(doc["gamma"], "gamma");
    if (!(omega > 0.0)) {
      fail("omega", "must be > 0, got " + format_double(omega));
    }
    if (!(gamma > 0.0)) {
      fail("gamma", "must be > 0, got " + format_double(gamma));
    }
    mode["omega"] = omega;
    mode["gamma"] = gamma;
    json bath;
    bath["N"] = expect_number(doc["N"], "N");
    bath["M"] = doc.contains("M")
                    ? complex_to_json(parse_complex(doc["M"], "M"))
                    : complex_to_json(Complex(0.0, 0.0));
    system["modes"] = json::array({mode});
    system["baths"] = json::array({bath});
    resolved = json::object();
    for (const char* key :
         {"command", "grids", "tolerances", "diffusion_convention",
          "output"}) {
      if (doc.contains(key)) resolved[key] = doc[key];
    }
    resolved["system"] = system;
  } else {
    check_known_keys(doc, "", {"command", "system", "grids", "tolerances",
                               "diffusion_convention", "output"});
    if (!doc.contains("system")) fail("system", "required");
  }

  RunConfig config;
  if (resolved.contains("command")) {
    config.command =
        command_from_string(expect_string(resolved["command"], "command"));
  }
  config.system = parse_system(resolved["system"]);
  if (resolved.contains("tolerances")) {
    config.tolerances = parse_tolerances(resolved["tolerances"]);
  }
  if (resolved.contains("diffusion_convention")) {
    config.convention = convention_from_string(expect_string(
        resolved["diffusion_convention"], "diffusion_convention"));
  }
  if (resolved.contains("output")) {
    config.output = parse_output(resolved["output"]);
  }

  const json grids =
      resolved.contains("grids") ? resolved["grids"] : json::object();
  if (!grids.is_object()) fail("grids", "must be an object");

  switch (config.command) {
    case Command::SingleMode:
    case Command::TwoMode: {
      check_known_keys(grids, "grids", {});
      const int want = config.command == Command::SingleMode ? 1 : 2;
      if (config.system.n_modes() != want) {
        fail("system.modes", "command " + to_string(config.command) +
                                 " requires exactly " + std::to_string(want) +
                                 " mode(s), got " +
                                 std::to_string(config.system.n_modes()));
      }
      break;
    }
    case Command::Evolve: {
      check_known_keys(grids, "grids", {"t_max", "t_count"});
      if (grids.contains("t_max")) {
        config.t_max = expect_number(grids["t_max"], "grids.t_max");
      }
      if (grids.contains("t_count")) {
        config.t_count = expect_int(grids["t_count"], "grids.t_count");
      }
      if (!(config.t_max > 0.0)) {
        fail("grids.t_max", "must be > 0, got " + format_double(config.t_max));
      }
      if (config.t_count < 1) {
        fail("grids.t_count",
             "must be >= 1, got " + std::to_string(config.t_count));
      }
      break;
    }
    case Command::EpScan: {
      check_known_keys(grids, "grids", {"m1", "m2", "gammas"});
      if (!grids.contains("m1")) fail("grids.m1", "required for ep-scan");
      config.m1_grid = parse_grid(grids["m1"], "grids.m1");
      if (config.system.n_modes() == 2) {
        if (!grids.contains("m2")) {
          fail("grids.m2", "required for a two-mode ep-scan");
        }
        config.m2_grid = parse_grid(grids["m2"], "grids.m2");
      } else if (grids.contains("m2")) {
        fail("grids.m2", "not used by a single-mode ep-scan");
      }
      if (grids.contains("gammas")) {
        config.gammas = parse_gamma_list(grids["gammas"], "grids.gammas");
      } else {
        config.gammas = {config.system.modes[0].gamma};
      }
      break;
    }
    case Command::PurityScan: {
      check_known_keys(grids, "grids", {"r", "gammas"});
      if (config.system.n_modes() != 1) {
        fail("system.modes", "purity-scan requires exactly 1 mode");
      }
      if (!grids.contains("r")) fail("grids.r", "required for purity-scan");
      config.r_grid = parse_grid(grids["r"], "grids.r");
      if (grids.contains("gammas")) {
        config.gammas = parse_gamma_list(grids["gammas"], "grids.gammas");
      } else {
        config.gammas = {config.system.modes[0].gamma};
      }
      const double n_val = config.system.baths[0].N;
      const double bound = std::sqrt(n_val * (n_val + 1.0));
      if (config.r_grid.max > bound + 1e-12) {
        fail("grids.r.max", "must be <= sqrt(N(N+1)) = " +
                                format_double(bound) +
                                " (squeezed-bath physicality bound), got " +
                                format_double(config.r_grid.max));
      }
      break;
    }
    case Command::EntropyScan: {
      check_known_keys(grids, "grids", {"m", "dm"});
      if (config.system.n_modes() != 2) {
        fail("system.modes", "entropy-scan requires exactly 2 modes");
      }
      if (std::abs(config.system.modes[0].omega -
                   config.system.modes[1].omega) > 1e-12) {
        fail("system.modes", "entropy-scan requires equal mode frequencies");
      }
      if (!grids.contains("m")) fail("grids.m", "required for entropy-scan");
      config.m_grid = parse_grid(grids["m"], "grids.m");
      if (grids.contains("dm")) {
        config.dm_grid = parse_grid(grids["dm"], "grids.dm");
      }
      break;
    }
  }

  // Fully-resolved echo (defaults filled) for reproducibility.
  json echo;
  echo["command"] = to_string(config.command);
  json system;
  system["J"] = config.system.J;
  system["modes"] = json::array();
  for (const ModeSpec& mode : config.system.modes) {
    system["modes"].push_back(
        json{{"omega", mode.omega}, {"gamma", mode.gamma}});
  }
  system["baths"] = json::array();
  for (const BathMoments& bath : config.system.baths) {
    system["baths"].push_back(
        json{{"N", bath.N}, {"M", complex_to_json(bath.M)}});
  }
  echo["system"] = system;
  echo["diffusion_convention"] = to_string(config.convention);
  echo["tolerances"] =
      json{{"im_tol", config.tolerances.im_tol},
           {"integrator_tol", config.tolerances.integrator_tol},
           {"ep_tol", config.tolerances.ep_tol},
           {"gap_tolerance", config.tolerances.gap_tolerance},
           {"cond_degenerate", config.tolerances.cond_degenerate},
           {"stability_threshold", config.tolerances.stability_threshold}};
  json grids_echo = json::object();
  switch (config.command) {
    case Command::SingleMode:
    case Command::TwoMode:
      break;
    case Command::Evolve:
      grids_echo["t_max"] = config.t_max;
      grids_echo["t_count"] = config.t_count;
      break;
    case Command::EpScan:
      grids_echo["m1"] = grid_to_json(config.m1_grid);
      if (config.system.n_modes() == 2) {
        grids_echo["m2"] = grid_to_json(config.m2_grid);
      }
      grids_echo["gammas"] = config.gammas;
      break;
    case Command::PurityScan:
      grids_echo["r"] = grid_to_json(config.r_grid);
      grids_echo["gammas"] = config.gammas;
      break;
    case Command::EntropyScan:
      grids_echo["m"] = grid_to_json(config.m_grid);
      grids_echo["dm"] = grid_to_json(config.dm_grid);
      break;
  }
  echo["grids"] = grids_echo;
  echo["output"] = json{{"path", config.output.path},
                        {"format", to_string(config.output.format)}};
  config.echo = echo;
  return config;
}

RunConfig parse_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("config: cannot open file \"" + path + "\"");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("override: expected key=value, got \"" +
                          assignment + "\"");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  nlohmann::json value;
  try {
    value = nlohmann::json::parse(value_text);
  } catch (const nlohmann::json::parse_error&) {
    value = value_text;  // plain string value
  }

  std::vector<std::string> segments;
  std::istringstream stream(path);
  std::string segment;
  while (std::getline(stream, segment, '.')) {
    if (segment.empty()) {
      throw ValidationError("override: empty path segment in \"" + path +
                            "\"");
    }
    segments.push_back(segment);
  }
  if (segments.empty()) {
    throw ValidationError("override: empty key in \"" + assignment + "\"");
  }

  nlohmann::json* node = &doc;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    const std::string& seg = segments[i];
    const bool numeric =
        !seg.empty() && seg.find_first_not_of("0123456789") == std::string::npos;
    if (node->is_array()) {
      if (!numeric) {
        throw ValidationError("override: \"" + seg +
                              "\" indexes an array; use a numeric segment");
      }
      const std::size_t index = std::stoul(seg);
      if (index >= node->size()) {
        throw ValidationError("override: array index " + seg +
                              " out of range in \"" + path + "\"");
      }
      node = &(*node)[index];
    } else {
      if (!node->is_object()) *node = nlohmann::json::object();
      node = &(*node)[seg];
    }
  }
  const std::string& leaf = segments.back();
  if (node->is_array()) {
    const bool numeric = leaf.find_first_not_of("0123456789") ==
                         std::string::npos && !leaf.empty();
    if (!numeric) {
      throw ValidationError("override: \"" + leaf +
                            "\" indexes an array; use a numeric segment");
    }
    const std::size_t index = std::stoul(leaf);
    if (index >= node->size()) {
      throw ValidationError("override: array index " + leaf +
                            " out of range in \"" + path + "\"");
    }
    (*node)[index] = value;
  } else {
    if (!node->is_object()) *node = nlohmann::json::object();
    (*node)[leaf] = value;
  }
}

}  // namespace sqbath
