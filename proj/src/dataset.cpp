#include "logitbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "logitbench/error.hpp"
#include "logitbench/random.hpp"

namespace logitbench {
namespace {

std::vector<std::vector<std::string>> read_csv_records(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool first_char = true;
  char c;
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  while (in.get(c)) {
    if (first_char) {
      first_char = false;
      if (static_cast<unsigned char>(c) == 0xEF) {  // UTF-8 BOM
        char b1, b2;
        if (in.get(b1) && in.get(b2) && static_cast<unsigned char>(b1) == 0xBB &&
            static_cast<unsigned char>(b2) == 0xBF)
          continue;
        throw Error(ErrorCode::malformed_csv, "unexpected leading bytes");
      }
    }
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw Error(ErrorCode::malformed_csv, "quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::malformed_csv, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan" ||
         cell == "?" || cell == "null" || cell == "NULL";
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

RawTable parse_table(std::istream& in, const std::string& outcome, const LoadOptions& options) {
  auto records = read_csv_records(in);
  if (records.empty()) throw Error(ErrorCode::empty_input, "no header row");
  std::vector<std::string> header;
  for (const auto& h : records[0]) header.push_back(trim(h));
  {
    std::set<std::string> seen;
    for (const auto& h : header)
      if (!seen.insert(h).second) throw Error(ErrorCode::malformed_csv, "duplicate column name '" + h + "'");
  }
  auto outcome_it = std::find(header.begin(), header.end(), outcome);
  if (outcome_it == header.end())
    throw Error(ErrorCode::outcome_column_missing, "outcome column '" + outcome + "' not found");
  const std::size_t outcome_col = static_cast<std::size_t>(outcome_it - header.begin());
  const std::size_t width = header.size();

  RawTable table;
  table.outcome_name = outcome;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() != width)
      throw Error(ErrorCode::malformed_csv, "row " + std::to_string(r + 1) + " has " +
                                                std::to_string(rec.size()) + " fields, expected " +
                                                std::to_string(width));
    for (auto& cell : rec) cell = trim(cell);
    if (std::any_of(rec.begin(), rec.end(), is_missing)) {
      ++table.dropped_rows;
      continue;
    }
    rows.push_back(std::move(rec));
  }

  // Outcome coercion: two distinct values; numeric pairs map smaller -> 0,
  // otherwise labels are ordered by name.
  std::set<std::string> outcome_values;
  for (const auto& row : rows) outcome_values.insert(row[outcome_col]);
  if (outcome_values.size() != 2)
    throw Error(ErrorCode::outcome_not_binary, "outcome '" + outcome + "' has " +
                                                   std::to_string(outcome_values.size()) +
                                                   " distinct values");
  std::string lo = *outcome_values.begin();
  std::string hi = *std::next(outcome_values.begin());
  double dlo, dhi;
  if (parse_double(lo, dlo) && parse_double(hi, dhi) && dhi < dlo) std::swap(lo, hi);
  table.negative_label = lo;
  table.positive_label = hi;
  table.y.reserve(rows.size());
  for (const auto& row : rows) table.y.push_back(row[outcome_col] == hi ? 1 : 0);

  for (std::size_t c = 0; c < width; ++c) {
    if (c == outcome_col) continue;
    RawColumn col;
    col.name = header[c];
    bool all_numeric = true;
    std::vector<double> values(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!parse_double(rows[r][c], values[r])) {
        all_numeric = false;
        if (contains(options.numeric, col.name))
          throw Error(ErrorCode::non_numeric_cell, "column '" + col.name + "' row " +
                                                       std::to_string(r + 2) + ": '" + rows[r][c] + "'");
      }
    }
    const bool categorical = contains(options.categorical, col.name) || !all_numeric;
    if (categorical) {
      col.kind = ColumnKind::categorical;
      col.text.reserve(rows.size());
      for (const auto& row : rows) col.text.push_back(row[c]);
    } else {
      col.kind = ColumnKind::numeric;
      col.values = std::move(values);
    }
    table.predictors.push_back(std::move(col));
  }
  return table;
}

RawTable load_dataset(const std::filesystem::path& path, const std::string& outcome,
                      const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open '" + path.string() + "'");
  return parse_table(in, outcome, options);
}

Dataset::Dataset(Eigen::MatrixXd x, Eigen::VectorXd y, std::vector<ColumnInfo> columns,
                 std::vector<std::string> dropped)
    : x_(std::move(x)), y_(std::move(y)), columns_(std::move(columns)), dropped_(std::move(dropped)) {
  if (x_.rows() != y_.size())
    throw Error(ErrorCode::length_mismatch, "design rows and outcome length differ");
  if (static_cast<Eigen::Index>(columns_.size()) != x_.cols())
    throw Error(ErrorCode::length_mismatch, "column metadata does not match design width");
  for (Eigen::Index i = 0; i < y_.size(); ++i)
    if (y_[i] != 0.0 && y_[i] != 1.0) throw Error(ErrorCode::outcome_not_binary, "outcome must be 0/1");
}

std::vector<std::string> Dataset::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

Dataset Dataset::rows(std::span<const Eigen::Index> idx) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(idx.size()), x_.cols());
  Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = x_.row(idx[r]);
    y[static_cast<Eigen::Index>(r)] = y_[idx[r]];
  }
  return Dataset(std::move(x), std::move(y), columns_, dropped_);
}

Dataset Dataset::with_outcome(Eigen::VectorXd y) const { return Dataset(x_, std::move(y), columns_, dropped_); }

std::size_t Dataset::cases() const { return static_cast<std::size_t>(y_.sum()); }

Dataset process_predictors(const RawTable& raw) {
  const std::size_t n = raw.n();
  if (n < 4) throw Error(ErrorCode::degenerate_design, "need at least 4 complete rows");
  std::vector<Eigen::VectorXd> cols;
  std::vector<ColumnInfo> info;
  std::vector<std::string> dropped;

  for (const auto& col : raw.predictors) {
    if (col.kind == ColumnKind::numeric) {
      Eigen::Map<const Eigen::VectorXd> v(col.values.data(), static_cast<Eigen::Index>(n));
      const double mean = v.mean();
      const double var = (v.array() - mean).square().sum() / static_cast<double>(n - 1);
      if (!(var >= kNearZeroVariance)) {
        dropped.push_back(col.name);
        continue;
      }
      cols.push_back((v.array() - mean) / std::sqrt(var));
      info.push_back({col.name, col.name, false, "", ""});
      continue;
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& t : col.text) ++counts[t];
    if (counts.size() < 2) {
      dropped.push_back(col.name);
      continue;
    }
    // std::map iterates in name order, so the first maximum is the tie winner.
    std::string reference;
    std::size_t best = 0;
    for (const auto& [level, count] : counts)
      if (count > best) {
        best = count;
        reference = level;
      }
    for (const auto& [level, count] : counts) {
      if (level == reference) continue;
      Eigen::VectorXd d(static_cast<Eigen::Index>(n));
      for (std::size_t r = 0; r < n; ++r) d[static_cast<Eigen::Index>(r)] = col.text[r] == level ? 1.0 : 0.0;
      cols.push_back(std::move(d));
      info.push_back({col.name + "_" + level, col.name, true, level, reference});
    }
  }
  if (cols.empty()) throw Error(ErrorCode::degenerate_design, "all predictors were removed");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = cols[j];
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = raw.y[i];
  return Dataset(std::move(x), std::move(y), std::move(info), std::move(dropped));
}

RawTable to_raw(const Dataset& data) {
  RawTable raw;
  raw.outcome_name = "y";
  raw.negative_label = "0";
  raw.positive_label = "1";
  const auto n = data.n();
  raw.y.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) raw.y[static_cast<std::size_t>(i)] = data.y()[i] > 0.5 ? 1 : 0;

  const auto& cols = data.columns();
  std::vector<bool> done(cols.size(), false);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (done[j]) continue;
    RawColumn col;
    col.name = cols[j].source;
    if (!cols[j].dummy) {
      col.kind = ColumnKind::numeric;
      const auto& v = data.x().col(static_cast<Eigen::Index>(j));
      col.values.assign(v.data(), v.data() + n);
      done[j] = true;
    } else {
      col.kind = ColumnKind::categorical;
      col.text.assign(static_cast<std::size_t>(n), cols[j].reference);
      for (std::size_t k = j; k < cols.size(); ++k) {
        if (!cols[k].dummy || cols[k].source != cols[j].source) continue;
        done[k] = true;
        for (Eigen::Index i = 0; i < n; ++i)
          if (data.x()(i, static_cast<Eigen::Index>(k)) > 0.5) col.text[static_cast<std::size_t>(i)] = cols[k].level;
      }
    }
    raw.predictors.push_back(std::move(col));
  }
  return raw;
}

std::vector<int> make_folds(const Eigen::VectorXd& y, int k, std::uint64_t seed, bool strict) {
  const auto n = y.size();
  if (k < 2) throw Error(ErrorCode::invalid_argument, "fold count must be at least 2");
  if (n < 2 * k) throw Error(ErrorCode::invalid_argument, "need n >= 2k for k-fold assignment");
  std::vector<std::vector<Eigen::Index>> strata(2);
  for (Eigen::Index i = 0; i < n; ++i) strata[y[i] > 0.5 ? 1 : 0].push_back(i);
  if (strict)
    for (const auto& s : strata)
      if (static_cast<int>(s.size()) < k)
        throw Error(ErrorCode::stratification_infeasible, "a class has fewer members than folds");

  Rng rng(seed);
  std::vector<int> folds(static_cast<std::size_t>(n), 0);
  int next = 0;
  for (auto& s : strata) {
    rng.shuffle(s);
    for (Eigen::Index idx : s) {
      folds[static_cast<std::size_t>(idx)] = next;
      next = (next + 1) % k;
    }
  }
  return folds;
}

std::vector<Eigen::Index> fold_train_indices(const std::vector<int>& folds, int fold) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < folds.size(); ++i)
    if (folds[i] != fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<Eigen::Index> fold_test_indices(const std::vector<int>& folds, int fold) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < folds.size(); ++i)
    if (folds[i] == fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace logitbench
