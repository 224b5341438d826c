#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace logitbench {

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  std::string outcome;
  std::vector<std::string> categorical;
};

struct SimulationConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> methods;
  int replications = 100;
  int eval_folds = 5;
  std::uint64_t master_seed = 1;
  double timeout_seconds = 300.0;
  int enumeration_threshold = 20;
  std::string reference_method = "bma_bic";
  int threads = 1;
  int posterior_draws = 10000;
  int mc3_iterations = 10000;
  int tuning_folds = 10;

  // Throws ConfigError; unknown method names are checked by the harness.
  void validate() const;
  // Stable JSON rendering used for the manifest and its hash.
  std::string canonical_json() const;
};

// Subset of TOML: `key = value` pairs (integers, floats, booleans, quoted
// strings, arrays of strings), `#` comments and `[[dataset]]` tables.
// Relative dataset paths resolve against base_dir.
SimulationConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
SimulationConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace logitbench
