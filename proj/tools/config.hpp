#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freeprod/group.hpp"
#include "freeprod/measure.hpp"
#include "json.hpp"

namespace freeprod::cli {

/// Configuration problems; the message names the offending JSON path or the
/// line and column of a syntax error.
class ConfigError : public MalformedInput {
 public:
  using MalformedInput::MalformedInput;
};

using Json = nlohmann::ordered_json;

/// Parsed experiment configuration:
///
///   {
///     "group":   [ {"kind": "integer", "name": "a"},
///                  {"kind": "cyclic",  "name": "x", "order": 2},
///                  {"kind": "table",   "name": "S3", "table": [[...]],
///                   "generators": [1, 2], "generator_names": ["s", "t"]} ],
///     "lattice": {"dimension": 2},              // automaton only, instead of group
///     "measure": [ {"word": "a", "prob": 0.25}, ... ]
///              | {"kind": "srw", "lazy": 0.0},
///     "params":  { command-specific }
///   }
struct Config {
  std::optional<GroupContext> group;
  std::optional<int> lattice_dimension;
  std::optional<DrivingMeasure> measure;
  Json params = Json::object();
  std::string raw;
};

Config parse_config(const std::string& text);

/// FNV-1a 64-bit hash of the config bytes, as 16 hex digits.
std::string config_hash(const std::string& text);

/// Reads params fields with type checking. Every key must be consumed or
/// declared, so unknown keys are rejected by finish().
class Params {
 public:
  Params(const Json& params, std::string command);
  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt);
  double real(const std::string& key, std::optional<double> fallback = std::nullopt);
  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt);
  bool has(const std::string& key) const { return params_.contains(key); }
  /// Either a list of numbers, {"from", "to", "step"} or {"from", "to", "count"}.
  std::vector<double> grid(const std::string& key, std::vector<double> fallback);
  std::vector<std::int64_t> integers(const std::string& key, std::vector<std::int64_t> fallback);
  const Json& raw(const std::string& key);
  void finish() const;

 private:
  const Json* find(const std::string& key);
  std::string path(const std::string& key) const { return "params." + key; }
  const Json& params_;
  std::string command_;
  std::vector<std::string> used_;
};

}  // namespace freeprod::cli
