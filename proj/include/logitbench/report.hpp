#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "logitbench/harness.hpp"
#include "logitbench/scoring.hpp"

namespace logitbench {

struct ReportOptions {
  std::string reference;  // empty: the archive's configured reference
  bool stratify = false;
};

struct Report {
  std::vector<ScoreBoard> boards;
  std::vector<std::string> notices;
};

// Throws EmptyInput when no board can be built.
Report score_archive(const Archive& archive, const ReportOptions& options);

std::string render_markdown(const Report& report);

// scores.csv, scores.md and one heatmap_<stratum>.svg per board.
void write_report(const Report& report, const std::filesystem::path& out_dir);

}  // namespace logitbench
