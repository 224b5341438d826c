#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "logitbench/catalog.hpp"
#include "logitbench/config.hpp"
#include "logitbench/dgp.hpp"
#include "logitbench/metrics.hpp"
#include "logitbench/scoring.hpp"

namespace logitbench {

struct ResultRecord {
  std::string dataset;
  int replication = 0;
  std::string method;
  std::uint64_t seed = 0;
  bool separated = false;
  MetricRecord metrics;
  std::string error;
  std::vector<double> fold_brier;  // per evaluation fold
  std::vector<int> fold_sizes;
  double cpu_seconds = 0.0;  // kept out of the deterministic archive file
};

// Full-data fit for the estimation metrics plus one fit per evaluation fold
// for pooled held-out probabilities. Any exception marks the output failed.
MethodOutput run_method(const MethodRegistry& registry, const std::string& method, const MatrixXd& x,
                        const VectorXd& y, const std::vector<int>& folds, int eval_folds, std::uint64_t seed,
                        double timeout_seconds, const MethodSettings& settings);

// True if the training part of any fold separates (an undecidable fold counts as separated).
bool any_fold_separated(const MatrixXd& x, const VectorXd& y, const std::vector<int>& folds, int eval_folds);

struct ReplicationPlan {
  std::string dataset;
  const MatrixXd* x = nullptr;
  const GeneratingModel* gm = nullptr;
  std::vector<std::string> methods;
  int replications = 100;
  int eval_folds = 5;
  std::uint64_t master_seed = 1;
  double timeout_seconds = 300.0;
  MethodSettings settings;
  int threads = 1;
};

// Every (replication, method) unit of one dataset, canonically sorted.
std::vector<ResultRecord> run_replications(const ReplicationPlan& plan, const MethodRegistry& registry);

struct SimulationSummary {
  std::filesystem::path archive;
  std::size_t records = 0;
  std::vector<std::string> skipped;  // "name: reason"
};

SimulationSummary run_simulation(const SimulationConfig& config, const std::filesystem::path& out_dir,
                                 const MethodRegistry& registry = MethodRegistry::builtin());

void sort_records(std::vector<ResultRecord>& records);
std::string record_json(const ResultRecord& r);
ResultRecord parse_record_json(const std::string& line);

struct Archive {
  std::string manifest;  // raw JSON text
  std::vector<ResultRecord> records;
};

// Reads manifest.json, results.jsonl and (if present) timing.jsonl.
Archive read_archive(const std::filesystem::path& dir);

std::vector<ScoreInput> to_score_inputs(const std::vector<ResultRecord>& records);

// Run fn(i) for i in [0, count) on `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace logitbench
