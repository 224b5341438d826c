#include "logitbench/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "logitbench/dataset.hpp"
#include "logitbench/dgp.hpp"
#include "logitbench/error.hpp"
#include "logitbench/harness.hpp"
#include "logitbench/log.hpp"
#include "logitbench/report.hpp"

namespace logitbench {
namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::unknown_method:
    case ErrorCode::invalid_argument:
      return 2;
    case ErrorCode::missing_file:
    case ErrorCode::outcome_column_missing:
    case ErrorCode::outcome_not_binary:
    case ErrorCode::non_numeric_cell:
    case ErrorCode::malformed_csv:
    case ErrorCode::degenerate_design:
      return 3;
    case ErrorCode::empty_input:
    case ErrorCode::empty_model_selected:
      return 4;
    default:
      return 1;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Benchmark harness for variable selection in logistic regression"};
  app.require_subcommand(1);
  std::string level = "warn";
  app.add_option("--log-level", level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

  std::string input, outcome, out_path, config_path, methods, reference, archive;
  std::vector<std::string> categorical;
  std::uint64_t seed = 0;
  int threads = 0, replications = 0;
  bool stratify = false;

  auto* ingest = app.add_subcommand("ingest", "Load a CSV and summarize the processed design");
  ingest->add_option("--input", input, "CSV file")->required();
  ingest->add_option("--outcome", outcome, "binary outcome column")->required();
  ingest->add_option("--categorical", categorical, "columns to treat as categorical")->delimiter(',');

  auto* dgm = app.add_subcommand("dgm", "Build a generating model from a CSV and write it as JSON");
  dgm->add_option("--input", input, "CSV file")->required();
  dgm->add_option("--outcome", outcome, "binary outcome column")->required();
  dgm->add_option("--categorical", categorical, "columns to treat as categorical")->delimiter(',');
  dgm->add_option("--out", out_path, "output JSON (stdout if omitted)");

  auto* simulate = app.add_subcommand("simulate", "Run the simulation described by a config file");
  simulate->add_option("--config", config_path, "TOML config")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "override master seed");
  simulate->add_option("--methods", methods, "comma-separated method list overriding the config");
  simulate->add_option("--out", out_path, "archive directory")->required();
  simulate->add_option("--threads", threads, "worker threads");
  simulate->add_option("--replications", replications, "override replication count");

  auto* score = app.add_subcommand("score", "Aggregate an archive into score boards");
  score->add_option("--archive", archive, "archive directory")->required();
  score->add_option("--reference", reference, "reference method");
  score->add_flag("--stratify-separation", stratify, "separate boards for replicates with and without separation");
  score->add_option("--out", out_path, "CSV output (markdown goes to stdout)");

  auto* report = app.add_subcommand("report", "Write CSV, markdown and SVG reports for an archive");
  report->add_option("--archive", archive, "archive directory")->required();
  report->add_option("--reference", reference, "reference method");
  report->add_flag("--stratify-separation", stratify, "separate boards for replicates with and without separation");
  report->add_option("--out", out_path, "output directory")->required();

  app.add_subcommand("methods", "List the method catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::map<std::string, LogLevel> levels = {{"debug", LogLevel::debug},
                                                  {"info", LogLevel::info},
                                                  {"warn", LogLevel::warn},
                                                  {"error", LogLevel::error},
                                                  {"off", LogLevel::off}};
  set_log_level(levels.at(level));

  try {
    if (app.got_subcommand("methods")) {
      for (const std::string& name : MethodRegistry::builtin().names()) std::cout << name << "\n";
      return 0;
    }
    if (app.got_subcommand(ingest) || app.got_subcommand(dgm)) {
      LoadOptions opts;
      opts.categorical = categorical;
      const RawTable raw = load_dataset(input, outcome, opts);
      const Dataset data = process_predictors(raw);
      if (app.got_subcommand(ingest)) {
        std::cout << "rows: " << data.n() << " (dropped " << raw.dropped_rows << " with missing cells)\n";
        std::cout << "outcome: " << outcome << " (0 = " << raw.negative_label << ", 1 = " << raw.positive_label
                  << ", cases " << data.cases() << ")\n";
        std::cout << "predictors: " << data.p() << "\n";
        for (const auto& c : data.columns()) std::cout << "  " << c.name << "\n";
        for (const auto& d : data.dropped_columns()) std::cout << "  dropped: " << d << "\n";
        return 0;
      }
      GeneratingModel gm = fit_generating_model(data.x(), data.y(), screen_variables(data.x(), data.y()));
      gm.names = data.names();
      const std::string text = to_json(gm) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + out_path);
        out << text;
      }
      return 0;
    }
    if (app.got_subcommand(simulate)) {
      SimulationConfig cfg = load_config(config_path);
      if (*seed_opt) cfg.master_seed = seed;
      if (!methods.empty()) cfg.methods = split_list(methods);
      if (threads > 0) cfg.threads = threads;
      if (replications > 0) cfg.replications = replications;
      const SimulationSummary s = run_simulation(cfg, out_path);
      for (const std::string& skip : s.skipped) std::cerr << "skipped " << skip << "\n";
      std::cout << "wrote " << s.records << " records to " << s.archive.string() << "\n";
      return s.records == 0 ? 4 : 0;
    }
    ReportOptions opts{reference, stratify};
    const Report rep = score_archive(read_archive(archive), opts);
    if (app.got_subcommand(score)) {
      std::cout << render_markdown(rep);
      if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + out_path);
        out << scoreboard_csv(rep.boards);
      }
      return 0;
    }
    write_report(rep, out_path);
    for (const std::string& n : rep.notices) std::cerr << n << "\n";
    std::cout << "wrote report for " << rep.boards.size() << " board(s) to " << out_path << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace logitbench
