#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace logitbench {

enum class ColumnKind { numeric, categorical };

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> text;  // cell text, kept for categorical columns
  std::vector<double> values;     // parsed cells, filled for numeric columns
};

// Predictor columns plus the outcome coerced to {0,1}. Rows with a missing
// cell anywhere are dropped at load time.
struct RawTable {
  std::vector<RawColumn> predictors;
  std::string outcome_name;
  std::vector<int> y;
  std::string negative_label;
  std::string positive_label;
  std::size_t dropped_rows = 0;

  std::size_t n() const { return y.size(); }
  std::size_t p() const { return predictors.size(); }
};

struct LoadOptions {
  // Column kinds are inferred (all-numeric -> numeric) unless overridden here.
  std::vector<std::string> categorical;
  std::vector<std::string> numeric;
};

RawTable load_dataset(const std::filesystem::path& path, const std::string& outcome,
                      const LoadOptions& options = {});
RawTable parse_table(std::istream& in, const std::string& outcome, const LoadOptions& options = {});

struct ColumnInfo {
  std::string name;
  std::string source;
  bool dummy = false;
  std::string level;      // dummies only
  std::string reference;  // dummies only: the omitted level
};

// Standardized design matrix (no intercept column) and binary outcome.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd x, Eigen::VectorXd y, std::vector<ColumnInfo> columns,
          std::vector<std::string> dropped = {});

  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index p() const { return x_.cols(); }
  const std::vector<ColumnInfo>& columns() const { return columns_; }
  std::vector<std::string> names() const;
  const std::vector<std::string>& dropped_columns() const { return dropped_; }

  Dataset rows(std::span<const Eigen::Index> idx) const;
  Dataset with_outcome(Eigen::VectorXd y) const;
  std::size_t cases() const;

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  std::vector<ColumnInfo> columns_;
  std::vector<std::string> dropped_;
};

inline constexpr double kNearZeroVariance = 1e-20;

// Dummy-codes categoricals against their most frequent level (ties broken by
// level name), drops single-level factors and near-constant columns, and
// standardizes continuous columns to mean 0 / sample variance 1.
Dataset process_predictors(const RawTable& raw);

// Rebuilds a RawTable from a processed Dataset (dummies folded back into
// factors). process_predictors(to_raw(d)) reproduces d.
RawTable to_raw(const Dataset& data);

// Stratified fold labels in [0, k). Classes are dealt round-robin after a
// seeded shuffle, continuing the rotation across classes.
std::vector<int> make_folds(const Eigen::VectorXd& y, int k, std::uint64_t seed, bool strict = false);

std::vector<Eigen::Index> fold_train_indices(const std::vector<int>& folds, int fold);
std::vector<Eigen::Index> fold_test_indices(const std::vector<int>& folds, int fold);

}  // namespace logitbench
