#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace gpscat::cli {

enum class KeyType { integer, number, number_or_inf, text, boolean };

struct KeySpec {
  std::string key;
  KeyType type;
  nlohmann::json default_value;
  std::string doc;
};

/// Every accepted key with its default. Flat, dotted names.
const std::vector<KeySpec>& key_table();

/**
 * Flat key/value experiment configuration. Values are validated against
 * key_table() on every set; the JSON form written by to_json() reads back
 * to an equal config.
 */
class ExperimentConfig {
 public:
  ExperimentConfig();

  /// Parse a JSON document. ConfigError carries "line N" and the offending key.
  static ExperimentConfig parse(const std::string& text, const std::string& origin = "<string>");
  static ExperimentConfig load(const std::string& path);

  /// Throws ConfigError for unknown keys or mistyped values.
  void set(const std::string& key, const nlohmann::json& value);

  int integer(const std::string& key) const;
  double number(const std::string& key) const;  ///< "inf" reads as infinity
  std::string text(const std::string& key) const;
  bool boolean(const std::string& key) const;

  /// Sorted by key; stable across runs.
  nlohmann::json to_json() const;
  std::string dump() const { return to_json().dump(2) + "\n"; }

  bool operator==(const ExperimentConfig& other) const { return values_ == other.values_; }

 private:
  const nlohmann::json& raw(const std::string& key) const;
  std::map<std::string, nlohmann::json> values_;
};

/// 1-based line of byte offset `byte` in `text`.
int line_of_offset(const std::string& text, std::size_t byte);
/// Line of the first occurrence of "key" as a JSON member name, or 0.
int line_of_key(const std::string& text, const std::string& key);

}  // namespace gpscat::cli
