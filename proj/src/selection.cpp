#include "logitbench/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "logitbench/deadline.hpp"
#include "logitbench/error.hpp"
#include "logitbench/separation.hpp"

namespace logitbench {
namespace {

SelectionResult package(const MatrixRef& x, const ModelId& model, FitResult fit) {
  const Index p = x.cols();
  SelectionResult r;
  r.selected = model;
  r.beta = expand_coefficients(fit.beta, model, p);
  r.ci_lower = expand_coefficients(fit.ci_lower(), model, p);
  r.ci_upper = expand_coefficients(fit.ci_upper(), model, p);
  r.fit = std::move(fit);
  return r;
}

// A finite MLE exists iff the rows are not separated on `model`. Numerically
// a separated fit can still meet the gradient tolerance before the divergence
// guard trips, so the fitter alone does not catch it. An undecided LP leaves
// the verdict to the fitter.
bool mle_exists(const MatrixRef& x, const VectorRef& y, const ModelId& model) {
  try {
    return !detect_separation(select_columns(x, model), y).separated;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::timeout) throw;
    return true;
  }
}

ModelId full_model(Index p) {
  ModelId m(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) m[static_cast<std::size_t>(j)] = static_cast<int>(j);
  return m;
}

}  // namespace

const char* to_string(StepDirection direction) {
  switch (direction) {
    case StepDirection::forward: return "forward";
    case StepDirection::backward: return "backward";
    case StepDirection::both: return "both";
  }
  return "unknown";
}

FitResult fit_submodel(const MatrixRef& x, const VectorRef& y, const ModelId& model) {
  FitResult fit = fit_mle(select_columns(x, model), y, true);
  if (!fit.converged) throw Error(ErrorCode::no_convergence, "maximum likelihood did not converge");
  return fit;
}

SelectionResult pvalue_select(const MatrixRef& x, const VectorRef& y, double threshold) {
  const int p = static_cast<int>(x.cols());
  const ModelId full = full_model(p);
  if (!mle_exists(x, y, full)) throw Error(ErrorCode::separation_suspected, "data are separated; the full-model MLE does not exist");
  FitResult full_fit = fit_submodel(x, y, full);

  ModelId kept;
  for (int j = 0; j < p; ++j)
    if (threshold >= 1.0 || full_fit.pvalues[j + 1] < threshold) kept.push_back(j);

  VectorXd score = VectorXd::Ones(p) - full_fit.pvalues.tail(p);
  FitResult refit = kept.size() == full.size() ? std::move(full_fit) : fit_submodel(x, y, kept);
  SelectionResult r = package(x, kept, std::move(refit));
  r.inclusion_score = score;
  return r;
}

double stepwise_criterion(double loglik, std::size_t model_size, double penalty_per_param) {
  return -2.0 * loglik + penalty_per_param * static_cast<double>(model_size + 1);
}

SelectionResult stepwise_select(const MatrixRef& x, const VectorRef& y, const StepwiseConfig& config) {
  if (!(config.penalty_per_param >= 0.0)) throw Error(ErrorCode::invalid_argument, "stepwise penalty must be >= 0");
  const int p = static_cast<int>(x.cols());

  // Every submodel of a non-separated model is non-separated, so one check on
  // the full model usually settles all candidates.
  const bool full_ok = mle_exists(x, y, full_model(p));
  if (!full_ok && config.direction != StepDirection::forward)
    throw Error(ErrorCode::separation_suspected, "data are separated; the full-model MLE does not exist");

  // nullopt marks a candidate whose fit failed.
  std::map<ModelId, std::optional<FitResult>> fits;
  auto try_fit = [&](const ModelId& m) -> const std::optional<FitResult>& {
    auto it = fits.find(m);
    if (it != fits.end()) return it->second;
    std::optional<FitResult> f;
    try {
      if (full_ok || mle_exists(x, y, m)) f = fit_submodel(x, y, m);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::timeout) throw;
    }
    return fits.emplace(m, std::move(f)).first->second;
  };

  ModelId current;
  if (config.direction != StepDirection::forward)
    for (int j = 0; j < p; ++j) current.push_back(j);
  const FitResult start = fit_submodel(x, y, current);
  fits.emplace(current, start);
  double current_crit = stepwise_criterion(start.loglik, current.size(), config.penalty_per_param);

  SelectionResult result;
  result.criterion_path.push_back(current_crit);
  for (int step = 0; step < config.max_steps; ++step) {
    check_deadline();
    std::vector<ModelId> candidates;
    const bool add = config.direction != StepDirection::backward;
    const bool drop = config.direction != StepDirection::forward;
    if (add) {
      for (int j = 0; j < p; ++j) {
        if (std::binary_search(current.begin(), current.end(), j)) continue;
        ModelId m = current;
        m.insert(std::lower_bound(m.begin(), m.end(), j), j);
        candidates.push_back(std::move(m));
      }
    }
    if (drop) {
      for (std::size_t i = 0; i < current.size(); ++i) {
        ModelId m = current;
        m.erase(m.begin() + static_cast<std::ptrdiff_t>(i));
        candidates.push_back(std::move(m));
      }
    }
    std::optional<std::size_t> best;
    double best_crit = current_crit;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto& f = try_fit(candidates[c]);
      if (!f) continue;
      const double crit = stepwise_criterion(f->loglik, candidates[c].size(), config.penalty_per_param);
      if (crit < best_crit) {
        best_crit = crit;
        best = c;
      }
    }
    if (!best) break;
    current = candidates[*best];
    current_crit = best_crit;
    result.criterion_path.push_back(current_crit);
  }

  SelectionResult out = package(x, current, *fits.at(current));
  out.criterion_path = std::move(result.criterion_path);
  out.inclusion_score = VectorXd::Zero(p);
  for (int j : current) out.inclusion_score[j] = 1.0;
  return out;
}

}  // namespace logitbench
