#include "logitbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "logitbench/error.hpp"

namespace logitbench {

double rmse(const VectorRef& beta_hat, const VectorRef& beta_true) {
  if (beta_hat.size() != beta_true.size()) throw Error(ErrorCode::length_mismatch, "RMSE vectors differ in length");
  if (beta_hat.size() == 0) throw Error(ErrorCode::empty_input, "RMSE of an empty vector");
  return std::sqrt((beta_hat - beta_true).squaredNorm() / static_cast<double>(beta_hat.size()));
}

double interval_score(double lower, double upper, double truth, double alpha) {
  if (lower > upper) throw Error(ErrorCode::invalid_argument, "interval lower bound exceeds upper bound");
  double s = upper - lower;
  if (truth < lower) s += 2.0 / alpha * (lower - truth);
  if (truth > upper) s += 2.0 / alpha * (truth - upper);
  return s;
}

double mean_interval_score(const VectorRef& lower, const VectorRef& upper, const VectorRef& truth, double alpha) {
  if (lower.size() != upper.size() || lower.size() != truth.size())
    throw Error(ErrorCode::length_mismatch, "interval vectors differ in length");
  if (truth.size() == 0) throw Error(ErrorCode::empty_input, "interval score of an empty vector");
  double s = 0.0;
  for (Index j = 0; j < truth.size(); ++j) s += interval_score(lower[j], upper[j], truth[j], alpha);
  return s / static_cast<double>(truth.size());
}

double auprc(const VectorRef& score, const std::vector<bool>& relevant) {
  if (static_cast<std::size_t>(score.size()) != relevant.size())
    throw Error(ErrorCode::length_mismatch, "scores and relevance flags differ in length");
  const auto k = std::count(relevant.begin(), relevant.end(), true);
  if (k == 0 || k == static_cast<long>(relevant.size()))
    throw Error(ErrorCode::metric_unavailable, "AUPRC needs relevant and irrelevant predictors");
  if (!score.allFinite()) throw Error(ErrorCode::invalid_argument, "inclusion scores must be finite");

  std::vector<Index> order(relevant.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return score[a] > score[b]; });
  double ap = 0.0;
  double hits = 0.0, seen = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    double block_hits = 0.0;
    while (j < order.size() && score[order[j]] == score[order[i]]) {
      block_hits += relevant[order[j]] ? 1.0 : 0.0;
      ++j;
    }
    hits += block_hits;
    seen += static_cast<double>(j - i);
    ap += block_hits / static_cast<double>(k) * (hits / seen);
    i = j;
  }
  return ap;
}

double brier(const VectorRef& probs, const VectorRef& outcomes) {
  if (probs.size() != outcomes.size()) throw Error(ErrorCode::length_mismatch, "probabilities and outcomes differ");
  if (probs.size() == 0) throw Error(ErrorCode::empty_input, "Brier score of no predictions");
  return (probs - outcomes).squaredNorm() / static_cast<double>(probs.size());
}

MetricRecord compute_metrics(const MethodOutput& out, const VectorRef& beta_true, const VectorRef& outcomes) {
  MetricRecord rec;
  rec.cpu_minutes = out.cpu_seconds / 60.0;
  if (out.failed) {
    rec.failed = true;
    return rec;
  }
  const Index p = beta_true.size() - 1;
  if (out.beta_hat.size() != p + 1) throw Error(ErrorCode::length_mismatch, "estimate has the wrong length");
  const VectorXd truth = beta_true.tail(p);
  rec.rmse = rmse(out.beta_hat.tail(p), truth);
  if (out.ci_lower && out.ci_upper) rec.mis = mean_interval_score(out.ci_lower->tail(p), out.ci_upper->tail(p), truth);
  std::vector<bool> relevant(p);
  for (Index j = 0; j < p; ++j) relevant[j] = truth[j] != 0.0;
  try {
    rec.auprc = auprc(out.inclusion_score, relevant);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::metric_unavailable) throw;
  }
  if (out.test_probs.size() > 0) rec.brier = brier(out.test_probs, outcomes);
  return rec;
}

}  // namespace logitbench
