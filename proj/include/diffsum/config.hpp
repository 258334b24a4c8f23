#pragma once
// Run configuration. Defaults may be overridden by a JSON file whose path is
// given by DIFFSUM_CONFIG, then by command-line flags.
//
//   {"seed": 1, "threads": 0, "materialization_limit": 1048576,
//    "sieve_max_value": 10000000000, "sieve_max_count": 20000000,
//    "oracle_max_q": 26, "oracle_max_diameter": 26, "format": "text"}
#include "diffsum/construction.hpp"
#include "diffsum/oracles.hpp"

#include <string>

namespace diffsum {

inline constexpr const char* kConfigEnvVar = "DIFFSUM_CONFIG";
inline constexpr std::uint64_t kDefaultSeed = 1;

enum class OutputFormat { text, csv, json };
OutputFormat parse_format(const std::string& name);
std::string format_name(OutputFormat f);

struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;  // 0: OpenMP default
  std::uint64_t materialization_limit = kDefaultMaterializationLimit;
  SieveLimits sieve;
  OracleLimits oracle;
  OutputFormat format = OutputFormat::text;

  StepOptions step_options() const;
  void validate() const;  // DomainError on a non-positive limit
};

// Applies the keys present in a JSON object; unknown keys are errors.
void apply_config_text(RunConfig& config, const std::string& json_text);
// Defaults, then the file named by DIFFSUM_CONFIG if set.
RunConfig load_default_config();

}  // namespace diffsum
