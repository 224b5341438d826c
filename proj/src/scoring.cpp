#include "logitbench/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

#include "logitbench/error.hpp"
#include "logitbench/log.hpp"

namespace logitbench {
namespace {

const std::optional<double>& field(const MetricRecord& r, int m) {
  switch (static_cast<Metric>(m)) {
    case Metric::rmse: return r.rmse;
    case Metric::mis: return r.mis;
    case Metric::auprc: return r.auprc;
    case Metric::brier: return r.brier;
  }
  return r.rmse;
}

// Aggregation runs in key order so sums do not depend on record order.
std::vector<ScoreInput> in_key_order(const std::vector<ScoreInput>& records) {
  std::vector<ScoreInput> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), [](const ScoreInput& a, const ScoreInput& b) {
    return std::tie(a.dataset, a.method, a.replication) < std::tie(b.dataset, b.method, b.replication);
  });
  return sorted;
}

double floored_log(double v) {
  if (!(v >= kRatioFloor)) {
    log_warn("metric mean below floor; using 1e-12");
    v = kRatioFloor;
  }
  return std::log(v);
}

std::optional<double> geometric_mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double s = 0.0;
  for (double v : values) s += std::log(v);
  return std::exp(s / static_cast<double>(values.size()));
}

std::string fmt17(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string fmt4(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", *v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::malformed_csv, "bad number in score table: " + s);
  }
}

const char* kCsvHeader =
    "stratum,reference,rank,method,rmse_ratio,mis_ratio,auprc_ratio,brier_ratio,full_score,available_score,"
    "partial_score,cpu_minutes_mean,cpu_minutes_total,failure_proportion,records";

}  // namespace

const char* to_string(Metric m) {
  switch (m) {
    case Metric::rmse: return "RMSE";
    case Metric::mis: return "MIS";
    case Metric::auprc: return "AUPRC";
    case Metric::brier: return "Brier";
  }
  return "unknown";
}

MetricMeans metric_means(const std::vector<ScoreInput>& records) {
  std::map<std::string, std::map<std::string, std::array<std::pair<double, int>, kMetricCount>>> acc;
  for (const ScoreInput& r : in_key_order(records)) {
    auto& cell = acc[r.dataset][r.method];
    if (r.metrics.failed) continue;
    for (int m = 0; m < kMetricCount; ++m) {
      const auto& v = field(r.metrics, m);
      if (!v) continue;
      cell[m].first += *v;
      cell[m].second += 1;
    }
  }
  MetricMeans means;
  for (const auto& [ds, methods] : acc)
    for (const auto& [method, cell] : methods) {
      MetricValues v;
      for (int m = 0; m < kMetricCount; ++m)
        if (cell[m].second > 0) v[m] = cell[m].first / cell[m].second;
      means[ds][method] = v;
    }
  return means;
}

std::map<std::string, MetricValues> standardize(const MetricMeans& means, const std::string& reference) {
  std::map<std::string, std::array<std::vector<double>, kMetricCount>> logs;
  std::set<std::string> methods;
  for (const auto& [ds, cells] : means) {
    auto ref = cells.find(reference);
    for (const auto& [method, values] : cells) {
      methods.insert(method);
      auto& slot = logs[method];
      if (ref == cells.end()) continue;
      for (int m = 0; m < kMetricCount; ++m) {
        if (!values[m] || !ref->second[m]) continue;
        double lr = floored_log(*values[m]) - floored_log(*ref->second[m]);
        if (static_cast<Metric>(m) == Metric::auprc) lr = -lr;
        slot[m].push_back(lr);
      }
    }
  }
  std::map<std::string, MetricValues> out;
  for (const std::string& method : methods) {
    MetricValues v;
    for (int m = 0; m < kMetricCount; ++m) {
      const auto& l = logs[method][m];
      if (l.empty()) continue;
      double s = 0.0;
      for (double x : l) s += x;
      v[m] = std::exp(s / static_cast<double>(l.size()));
    }
    out[method] = v;
  }
  return out;
}

ComposedScores compose_scores(const MetricValues& ratios) {
  ComposedScores c;
  std::vector<double> present;
  for (const auto& r : ratios)
    if (r) present.push_back(*r);
  c.available = geometric_mean(present);
  if (present.size() == ratios.size()) c.full = c.available;
  const auto& rm = ratios[static_cast<int>(Metric::rmse)];
  const auto& br = ratios[static_cast<int>(Metric::brier)];
  if (rm && br) c.partial = geometric_mean({*rm, *br});
  return c;
}

ScoreBoard build_scoreboard(const std::vector<ScoreInput>& records, const std::string& reference,
                            const std::string& stratum) {
  if (records.empty()) throw Error(ErrorCode::empty_input, "no records to score");
  ScoreBoard board;
  board.stratum = stratum;
  board.reference = reference;
  bool reference_ok = false;
  for (const ScoreInput& r : records)
    if (r.method == reference && !r.metrics.failed) reference_ok = true;
  if (!reference_ok)
    throw Error(ErrorCode::metric_unavailable, "reference method '" + reference + "' has no successful fits");

  const auto ratios = standardize(metric_means(records), reference);
  std::map<std::string, ScoreRow> rows;
  std::map<std::string, int> failures;
  for (const ScoreInput& r : in_key_order(records)) {
    ScoreRow& row = rows[r.method];
    row.method = r.method;
    row.records += 1;
    row.cpu_minutes_total += r.metrics.cpu_minutes;
    failures[r.method] += r.metrics.failed ? 1 : 0;
  }
  for (auto& [method, row] : rows) {
    row.cpu_minutes_mean = row.cpu_minutes_total / row.records;
    row.failure_proportion = static_cast<double>(failures[method]) / row.records;
    auto it = ratios.find(method);
    if (it != ratios.end()) row.ratio = it->second;
    row.scores = compose_scores(row.ratio);
    board.rows.push_back(row);
  }
  std::stable_sort(board.rows.begin(), board.rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    if (a.scores.partial.has_value() != b.scores.partial.has_value()) return a.scores.partial.has_value();
    if (a.scores.partial && *a.scores.partial != *b.scores.partial) return *a.scores.partial < *b.scores.partial;
    return a.method < b.method;
  });
  int rank = 0;
  for (ScoreRow& row : board.rows) row.rank = row.scores.partial ? ++rank : 0;
  return board;
}

StratifiedBoards stratify_by_separation(const std::vector<ScoreInput>& records, const std::string& reference) {
  std::vector<ScoreInput> with, without;
  for (const ScoreInput& r : records) (r.separated ? with : without).push_back(r);
  StratifiedBoards out;
  if (!with.empty()) out.with_separation = build_scoreboard(with, reference, "with_separation");
  if (!without.empty()) out.without_separation = build_scoreboard(without, reference, "without_separation");
  return out;
}

std::string scoreboard_csv(const std::vector<ScoreBoard>& boards) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const ScoreBoard& b : boards)
    for (const ScoreRow& r : b.rows) {
      os << b.stratum << "," << b.reference << "," << r.rank << "," << r.method;
      for (const auto& v : r.ratio) os << "," << fmt17(v);
      os << "," << fmt17(r.scores.full) << "," << fmt17(r.scores.available) << "," << fmt17(r.scores.partial);
      os << "," << fmt17(r.cpu_minutes_mean) << "," << fmt17(r.cpu_minutes_total) << ","
         << fmt17(r.failure_proportion) << "," << r.records << "\n";
    }
  return os.str();
}

std::vector<ScoreBoard> parse_scoreboard_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kCsvHeader))
    throw Error(ErrorCode::malformed_csv, "score table header not recognized");
  std::vector<ScoreBoard> boards;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 15) throw Error(ErrorCode::malformed_csv, "score table row has the wrong number of fields");
    if (boards.empty() || boards.back().stratum != f[0]) {
      boards.emplace_back();
      boards.back().stratum = f[0];
      boards.back().reference = f[1];
    }
    ScoreRow r;
    r.rank = std::stoi(f[2]);
    r.method = f[3];
    for (int m = 0; m < kMetricCount; ++m) r.ratio[m] = parse_opt(f[4 + m]);
    r.scores.full = parse_opt(f[8]);
    r.scores.available = parse_opt(f[9]);
    r.scores.partial = parse_opt(f[10]);
    r.cpu_minutes_mean = parse_opt(f[11]).value_or(0.0);
    r.cpu_minutes_total = parse_opt(f[12]).value_or(0.0);
    r.failure_proportion = parse_opt(f[13]).value_or(0.0);
    r.records = std::stoi(f[14]);
    boards.back().rows.push_back(r);
  }
  return boards;
}

std::string scoreboard_markdown(const ScoreBoard& board) {
  std::ostringstream os;
  os << "### " << board.stratum << " (reference: " << board.reference << ")\n\n";
  os << "| Rank | Method | Partial | Available | Full | RMSE | MIS | AUPRC | Brier | CPU min (mean) | Failures |\n";
  os << "|---:|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const ScoreRow& r : board.rows) {
    os << "| " << (r.rank ? std::to_string(r.rank) : "-") << " | " << r.method << " | " << fmt4(r.scores.partial)
       << " | " << fmt4(r.scores.available) << " | " << fmt4(r.scores.full);
    for (const auto& v : r.ratio) os << " | " << fmt4(v);
    os << " | " << fmt4(r.cpu_minutes_mean) << " | " << fmt4(r.failure_proportion) << " |\n";
  }
  return os.str();
}

namespace {

// Diverging colour for a ratio: blue below 1 (better), red above.
std::string ratio_colour(const std::optional<double>& v) {
  if (!v) return "#dddddd";
  const double t = std::clamp(std::log2(*v) / 2.0, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (t < 0) {
    r = static_cast<int>(255 * (1 + t * 0.8));
    g = static_cast<int>(255 * (1 + t * 0.5));
  } else {
    g = static_cast<int>(255 * (1 - t * 0.7));
    b = static_cast<int>(255 * (1 - t * 0.8));
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string grey(double frac) {
  const int v = static_cast<int>(255 - 120 * std::clamp(frac, 0.0, 1.0));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", v, v, v);
  return buf;
}

}  // namespace

std::string scoreboard_svg(const ScoreBoard& board) {
  const std::vector<std::string> headers = {"Full", "Available", "Partial", "RMSE", "MIS", "AUPRC", "Brier", "CPU min",
                                            "Failures"};
  const int cell_w = 80, cell_h = 22, label_w = 160, top = 50;
  const int width = label_w + cell_w * static_cast<int>(headers.size()) + 10;
  const int height = top + cell_h * static_cast<int>(board.rows.size()) + 10;
  double max_cpu = 0.0;
  for (const ScoreRow& r : board.rows) max_cpu = std::max(max_cpu, r.cpu_minutes_mean);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"4\" y=\"16\" font-size=\"13\">" << board.stratum << " (reference " << board.reference
     << ")</text>\n";
  for (std::size_t c = 0; c < headers.size(); ++c)
    os << "<text x=\"" << label_w + cell_w * c + cell_w / 2 << "\" y=\"" << top - 8
       << "\" text-anchor=\"middle\">" << headers[c] << "</text>\n";
  for (std::size_t i = 0; i < board.rows.size(); ++i) {
    const ScoreRow& r = board.rows[i];
    const int y = top + cell_h * static_cast<int>(i);
    os << "<text x=\"4\" y=\"" << y + 15 << "\">" << r.method << "</text>\n";
    std::vector<std::pair<std::string, std::string>> cells = {
        {ratio_colour(r.scores.full), fmt4(r.scores.full)},
        {ratio_colour(r.scores.available), fmt4(r.scores.available)},
        {ratio_colour(r.scores.partial), fmt4(r.scores.partial)}};
    for (const auto& v : r.ratio) cells.push_back({ratio_colour(v), fmt4(v)});
    cells.push_back({grey(max_cpu > 0 ? r.cpu_minutes_mean / max_cpu : 0.0), fmt4(r.cpu_minutes_mean)});
    cells.push_back({grey(r.failure_proportion), fmt4(r.failure_proportion)});
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const int x = label_w + cell_w * static_cast<int>(c);
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\"" << cell_h
         << "\" fill=\"" << cells[c].first << "\" stroke=\"#ffffff\"/>";
      os << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + 15 << "\" text-anchor=\"middle\">" << cells[c].second
         << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace logitbench
