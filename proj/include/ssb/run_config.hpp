#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssb/dynamics.hpp"

namespace ssb {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutputRootEnv = "SSBSIM_OUT";

struct ConfigError {
  std::string path;
  std::string message;
};

nlohmann::json errors_to_json(const std::vector<ConfigError>& errors);

// Parsed and fully defaulted run description. params holds the experiment
// block with every default materialized, so two configs that mean the same
// run canonicalize to identical JSON.
struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string experiment;
  std::string output_dir;  // empty: resolve from $SSBSIM_OUT or ./ssbsim-out
  std::uint64_t seed = 0;
  int workers = 0;  // 0: hardware default
  IntegratorOptions integrator;
  nlohmann::json params;
};

// Validates against the published schema; unknown fields are rejected.
// Returns nullopt and fills `errors` on any violation.
std::optional<RunConfig> parse_run_config(const nlohmann::json& doc,
                                          std::vector<ConfigError>& errors);

// Canonical serialized form: defaults materialized, keys sorted.
nlohmann::json canonical_json(const RunConfig& config);

// FNV-1a 64 over the canonical dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

std::string resolve_output_dir(const RunConfig& config,
                               const std::string& cli_override);

struct RunRecord {
  std::string name;
  std::string status;  // ok | failed | flagged
  std::string message;
};

struct RunManifest {
  std::string config_hash;
  std::string artifact_version = kArtifactVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<RunRecord> runs;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
};

std::string iso_timestamp_now();

// Executes the configured experiment, writes its outputs plus manifest.json
// into the output directory. Returns 0 on success, 3 when any sub-run failed
// numerically (failures are recorded in the manifest, not silently dropped).
int run_experiment(const RunConfig& config, const std::string& out_override);

}  // namespace ssb
