#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "logitbench/metrics.hpp"

namespace logitbench {

enum class Metric { rmse = 0, mis = 1, auprc = 2, brier = 3 };
inline constexpr int kMetricCount = 4;
const char* to_string(Metric m);

using MetricValues = std::array<std::optional<double>, kMetricCount>;

inline constexpr double kRatioFloor = 1e-12;

struct ScoreInput {
  std::string dataset;
  int replication = 0;
  std::string method;
  MetricRecord metrics;
  bool separated = false;
};

// dataset -> method -> per-metric mean over non-failed replicates.
using MetricMeans = std::map<std::string, std::map<std::string, MetricValues>>;

MetricMeans metric_means(const std::vector<ScoreInput>& records);

// Per-method geometric mean over datasets of method/reference ratios (lower is
// better). AUPRC is higher-is-better, so its ratio is reference/method.
std::map<std::string, MetricValues> standardize(const MetricMeans& means, const std::string& reference);

struct ComposedScores {
  std::optional<double> full;       // all four ratios
  std::optional<double> available;  // whatever is present
  std::optional<double> partial;    // RMSE and Brier
};

ComposedScores compose_scores(const MetricValues& ratios);

struct ScoreRow {
  std::string method;
  MetricValues ratio;
  ComposedScores scores;
  int rank = 0;  // 1-based by PartialScore; 0 when it is undefined
  double cpu_minutes_mean = 0.0;
  double cpu_minutes_total = 0.0;
  double failure_proportion = 0.0;
  int records = 0;
};

struct ScoreBoard {
  std::string stratum = "all";
  std::string reference;
  std::vector<ScoreRow> rows;  // ordered by rank; unranked rows last, by name
};

ScoreBoard build_scoreboard(const std::vector<ScoreInput>& records, const std::string& reference,
                            const std::string& stratum = "all");

struct StratifiedBoards {
  std::optional<ScoreBoard> with_separation;
  std::optional<ScoreBoard> without_separation;
};

// A record goes to the with-separation board iff its replicate separated in any fold.
StratifiedBoards stratify_by_separation(const std::vector<ScoreInput>& records, const std::string& reference);

std::string scoreboard_csv(const std::vector<ScoreBoard>& boards);
std::vector<ScoreBoard> parse_scoreboard_csv(const std::string& text);
std::string scoreboard_markdown(const ScoreBoard& board);
std::string scoreboard_svg(const ScoreBoard& board);

}  // namespace logitbench
