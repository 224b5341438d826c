#include "logitbench/report.hpp"

#include <fstream>
#include <json.hpp>

#include "logitbench/error.hpp"

namespace logitbench {
namespace {

void try_board(Report& report, const std::vector<ScoreInput>& inputs, const std::string& reference,
               const std::string& stratum) {
  if (inputs.empty()) {
    report.notices.push_back("stratum " + stratum + " is empty and was omitted");
    return;
  }
  try {
    report.boards.push_back(build_scoreboard(inputs, reference, stratum));
  } catch (const Error& e) {
    report.notices.push_back("stratum " + stratum + " omitted: " + e.what());
  }
}

}  // namespace

Report score_archive(const Archive& archive, const ReportOptions& options) {
  std::string reference = options.reference;
  if (reference.empty()) {
    try {
      reference = nlohmann::json::parse(archive.manifest).at("config").at("reference_method").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::config_error, "archive manifest names no reference method");
    }
  }
  if (archive.records.empty()) throw Error(ErrorCode::empty_input, "archive holds no result records");

  const std::vector<ScoreInput> inputs = to_score_inputs(archive.records);
  Report report;
  if (options.stratify) {
    std::vector<ScoreInput> with, without;
    for (const ScoreInput& r : inputs) (r.separated ? with : without).push_back(r);
    try_board(report, without, reference, "without_separation");
    try_board(report, with, reference, "with_separation");
  } else {
    try_board(report, inputs, reference, "all");
  }
  if (report.boards.empty()) {
    std::string why = "no score board could be built";
    for (const std::string& n : report.notices) why += "; " + n;
    throw Error(ErrorCode::empty_input, why);
  }
  return report;
}

std::string render_markdown(const Report& report) {
  std::string out;
  for (const ScoreBoard& b : report.boards) out += scoreboard_markdown(b) + "\n";
  for (const std::string& n : report.notices) out += "> " + n + "\n";
  return out;
}

void write_report(const Report& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + p.string());
    out << text;
  };
  write(out_dir / "scores.csv", scoreboard_csv(report.boards));
  write(out_dir / "scores.md", render_markdown(report));
  for (const ScoreBoard& b : report.boards) write(out_dir / ("heatmap_" + b.stratum + ".svg"), scoreboard_svg(b));
}

}  // namespace logitbench
