#include "experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gpscat/errors.hpp"

namespace gpscat::cli {

using nlohmann::json;

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table{
      {"command", KeyType::text, "", "informational; the subcommand on the command line wins"},
      {"grid.d", KeyType::integer, 2, "dimension, 1..6"},
      {"grid.N", KeyType::integer, 32, "points per axis: even, >= 8, 2^a or 3*2^a"},
      {"grid.L", KeyType::number, 40.0, "period per axis"},
      {"solve.dt", KeyType::number, 0.25, "Strang step"},
      {"solve.T", KeyType::number, 16.0, "final time"},
      {"solve.T0", KeyType::number, 1.0, "first Cauchy sample time"},
      {"solve.observe_every", KeyType::integer, 4, "observer cadence in steps"},
      {"solve.sigma", KeyType::number, 0.0, "low-frequency exponent of H^{sigma,s}"},
      {"solve.s", KeyType::number, -1.0, "high-frequency exponent; negative means d/2 - 1"},
      {"solve.epsilon_max", KeyType::number, 0.1, "smallness guard on ||V^{-1}u0||"},
      {"data.seed", KeyType::integer, 1, "seed of the random-window profile"},
      {"data.amplitude", KeyType::number, 0.01, "||V^{-1}u0||_{H^{sigma,s}}"},
      {"data.profile", KeyType::text, "gaussian", "gaussian | random-window"},
      {"data.width", KeyType::number, 3.0, "Gaussian width in length units"},
      {"identities.trials", KeyType::integer, 20, "random fields per identity"},
      {"linear.path", KeyType::text, "oracle", "oracle (radial quadrature) | grid"},
      {"linear.q", KeyType::number_or_inf, "inf", "Lebesgue exponent of the decay norm"},
      {"linear.R", KeyType::number, 1.0, "frequency scale of the oracle block"},
      {"linear.t_min", KeyType::number, 10.0, "first sample time"},
      {"linear.t_max", KeyType::number, 100.0, "last sample time"},
      {"linear.samples", KeyType::integer, 13, "log-spaced sample count"},
      {"strichartz.q", KeyType::number_or_inf, 4.0, "spatial exponent; p follows from admissibility"},
      {"waveop.T", KeyType::number, 16.0, "final-state horizon"},
      {"waveop.tol", KeyType::number, 1e-9, "Picard sweep tolerance"},
      {"waveop.max_iter", KeyType::integer, 30, "Picard sweep limit"},
      {"estimates.trials", KeyType::integer, 20, "random triples per trilinear case"},
      {"estimates.N", KeyType::integer, 16, "points per axis of the trilinear grid"},
      {"estimates.sweep_step", KeyType::integer, 120, "sigma sweep mesh is 1/sweep_step"},
      {"bilipschitz.pairs", KeyType::integer, 2, "random-window pairs probed"},
      {"tol.scale", KeyType::number, 1.0, "multiplies every tolerance below"},
      {"tol.identity", KeyType::number, 1e-10, "identity residuals"},
      {"tol.oracle", KeyType::number, 1e-8, "propagator vs per-mode oracle"},
      {"tol.exponent", KeyType::number, 0.1, "|fitted - predicted| decay exponent"},
      {"tol.envelope", KeyType::number, 3.0, "envelope constant band [1/x, x]"},
      {"tol.growth", KeyType::number, 2.0, "ratio growth bound (estimates, strichartz)"},
      {"tol.monotone", KeyType::number, 1.1, "slack in c_{k+1} <= x c_k"},
      {"tol.bilipschitz", KeyType::number, 2.0, "ratio band [1/x, x]"},
  };
  return table;
}

namespace {

const KeySpec* find_key(const std::string& key) {
  for (const auto& spec : key_table())
    if (spec.key == key) return &spec;
  return nullptr;
}

bool type_matches(KeyType type, const json& value) {
  switch (type) {
    case KeyType::integer: return value.is_number_integer();
    case KeyType::number: return value.is_number();
    case KeyType::number_or_inf: return value.is_number() || value == "inf";
    case KeyType::text: return value.is_string();
    case KeyType::boolean: return value.is_boolean();
  }
  return false;
}

const char* type_name(KeyType type) {
  switch (type) {
    case KeyType::integer: return "an integer";
    case KeyType::number: return "a number";
    case KeyType::number_or_inf: return "a number or \"inf\"";
    case KeyType::text: return "a string";
    case KeyType::boolean: return "a boolean";
  }
  return "?";
}

}  // namespace

int line_of_offset(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  int line = 1;
  for (std::size_t i = 0; i < byte; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

ExperimentConfig::ExperimentConfig() {
  for (const auto& spec : key_table()) values_[spec.key] = spec.default_value;
}

void ExperimentConfig::set(const std::string& key, const json& value) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw ConfigError("unknown key '" + key + "'");
  if (!type_matches(spec->type, value))
    throw ConfigError("key '" + key + "' must be " + type_name(spec->type) + ", got " + value.dump());
  // Integers stay integers so the echoed file reads back identically.
  if (spec->type == KeyType::number && value.is_number_integer())
    values_[key] = value.get<double>();
  else
    values_[key] = value;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": line " + std::to_string(line_of_offset(text, e.byte)) +
                      ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw ConfigError(origin + ": line 1: the config must be a JSON object");
  ExperimentConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ": line " + std::to_string(line_of_key(text, key)) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

const json& ExperimentConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

int ExperimentConfig::integer(const std::string& key) const { return raw(key).get<int>(); }

double ExperimentConfig::number(const std::string& key) const {
  const auto& v = raw(key);
  if (v.is_string()) return std::numeric_limits<double>::infinity();
  return v.get<double>();
}

std::string ExperimentConfig::text(const std::string& key) const { return raw(key).get<std::string>(); }

bool ExperimentConfig::boolean(const std::string& key) const { return raw(key).get<bool>(); }

json ExperimentConfig::to_json() const {
  json out = json::object();
  for (const auto& [key, value] : values_) out[key] = value;
  return out;
}

}  // namespace gpscat::cli
