#pragma once

// JSON configs and JSON/CSV reports.

#include "orbitdep/experiments.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace orbitdep {

using Json = nlohmann::ordered_json;

/// Malformed or invalid configuration.  `where` is a field path such as
/// "generators[0].forms[1]" or a "line L, column C" position.
class ConfigError : public DomainError {
 public:
  ConfigError(std::string where, const std::string& what)
      : DomainError(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct OutputPaths {
  std::string json;
  std::string csv;
};

struct LoadedConfig {
  ScenarioConfig scenario;
  OutputPaths output;
};

inline constexpr int kConfigSchema = 1;

LoadedConfig parse_config(const Json& j);
LoadedConfig parse_config_text(std::string_view text);
LoadedConfig load_config(const std::string& path);

Json to_json(const HomogeneousForm& f);
Json to_json(const Endomorphism& phi);
Json to_json(const Divisor& d);
Json to_json(const HeightValue& h);
Json to_json(const TorusPoint& t);
Json to_json(const Word& w);
Json to_json(const DependenceRelation& rel);
Json to_json(const EmpiricalConstants& c);
Json config_to_json(const ScenarioConfig& config, const OutputPaths& output = {});

HomogeneousForm form_from_json(const Json& j, std::size_t num_vars, const std::string& path);
Endomorphism endomorphism_from_json(const Json& j, std::size_t dimension, const std::string& path);

Json report_to_json(const ScanReport& report);
/// Two-space indented JSON with a trailing newline; byte-stable for a
/// fixed report.
std::string report_json_text(const ScanReport& report);
std::string report_csv(const ScanReport& report);

/// Rebuilds config and hits from report JSON, enough for replay_verify.
ScanReport report_from_json(const Json& j);

/// Generator indices in written order ("0 1 1" applies generator 1 first);
/// "id" for the identity.
std::string word_indices(const Word& w);

}  // namespace orbitdep
