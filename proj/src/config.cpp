#include "diffsum/config.hpp"

#include "diffsum/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace diffsum {

OutputFormat parse_format(const std::string& name) {
  if (name == "text") return OutputFormat::text;
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw DomainError("unknown format '" + name + "' (expected text, csv or json)");
}

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::text: return "text";
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
  }
  return "?";
}

StepOptions RunConfig::step_options() const {
  StepOptions o;
  o.sieve = sieve;
  o.materialization_limit = materialization_limit;
  return o;
}

void RunConfig::validate() const {
  if (materialization_limit == 0 || sieve.max_value == 0 || sieve.max_count == 0 || oracle.max_q == 0 ||
      oracle.max_diameter == 0) {
    throw DomainError("config: limits must be positive");
  }
}

void apply_config_text(RunConfig& config, const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("config: top level must be an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "threads") {
        config.threads = value.get<unsigned>();
      } else if (key == "materialization_limit") {
        config.materialization_limit = value.get<std::uint64_t>();
      } else if (key == "sieve_max_value") {
        config.sieve.max_value = value.get<std::uint64_t>();
      } else if (key == "sieve_max_count") {
        config.sieve.max_count = value.get<std::uint64_t>();
      } else if (key == "oracle_max_q") {
        config.oracle.max_q = value.get<std::uint64_t>();
      } else if (key == "oracle_max_diameter") {
        config.oracle.max_diameter = value.get<std::uint64_t>();
      } else if (key == "format") {
        config.format = parse_format(value.get<std::string>());
      } else {
        throw FormatError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: bad value: ") + e.what());
  }
  config.validate();
}

RunConfig load_default_config() {
  RunConfig c;
  const char* path = std::getenv(kConfigEnvVar);
  if (path == nullptr || *path == '\0') return c;
  std::ifstream in(path);
  if (!in) throw FormatError(std::string("config: cannot open '") + path + "' (from " + kConfigEnvVar + ")");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(c, ss.str());
  return c;
}

}  // namespace diffsum
