#include "logitbench/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "logitbench/error.hpp"
#include "logitbench/log.hpp"
#include "logitbench/penalized.hpp"
#include "logitbench/random.hpp"
#include "logitbench/selection.hpp"
#include "logitbench/separation.hpp"

namespace logitbench {
namespace {

// Indices of the `keep` largest scores, ties to the lower index, returned sorted.
ModelId top_by(const std::vector<double>& score, const ModelId& from, std::size_t keep) {
  std::vector<std::size_t> order(from.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  ModelId out;
  for (std::size_t i = 0; i < std::min(keep, order.size()); ++i) out.push_back(from[order[i]]);
  std::sort(out.begin(), out.end());
  return out;
}

double abs_correlation(const VectorXd& a, const VectorRef& b) {
  const VectorXd ac = a.array() - a.mean();
  const VectorXd bc = b.array() - b.mean();
  const double den = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
  return den > 0 ? std::abs(ac.dot(bc)) / den : 0.0;
}

double univariate_r2(const MatrixRef& x, const VectorRef& y, int j) {
  try {
    const FitResult fit = fit_submodel(x, y, {j});
    return mcfadden_r2(fit.loglik, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::timeout) throw;
    // A single predictor that separates the outcome explains it completely.
    return e.code() == ErrorCode::separation_suspected || e.code() == ErrorCode::no_convergence ? 1.0 : 0.0;
  }
}

ModelId univariate_selection(const MatrixRef& x, const VectorRef& y, const ModelId& screened) {
  ModelId out;
  for (int j : screened) {
    try {
      const FitResult fit = fit_submodel(x, y, {j});
      if (fit.pvalues[1] < 0.05) out.push_back(j);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::timeout) throw;
      if (e.code() == ErrorCode::separation_suspected || e.code() == ErrorCode::no_convergence) out.push_back(j);
    }
  }
  return out;
}

double bernoulli_loglik(const VectorRef& pi, const VectorRef& y) {
  double v = 0.0;
  for (Index i = 0; i < y.size(); ++i) v += y[i] > 0.5 ? std::log(pi[i]) : std::log1p(-pi[i]);
  return v;
}

}  // namespace

ModelId screen_variables(const MatrixRef& x, const VectorRef& y) {
  const int p = static_cast<int>(x.cols());
  ModelId all(p);
  std::iota(all.begin(), all.end(), 0);
  if (p < 30) return all;
  std::vector<double> corr(p);
  for (int j = 0; j < p; ++j) corr[j] = abs_correlation(x.col(j), y);
  ModelId kept = top_by(corr, all, std::min<std::size_t>(p, 80));
  if (kept.size() <= 30) return kept;
  std::vector<double> r2(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) r2[i] = univariate_r2(x, y, kept[i]);
  return top_by(r2, kept, 30);
}

VectorXd clipped_probs(const VectorRef& beta, const MatrixRef& x) {
  VectorXd eta = linear_predictor(beta, x);
  eta = eta.cwiseMax(-kDgpEtaClip).cwiseMin(kDgpEtaClip);
  return eta.unaryExpr([](double e) { return logistic(e); });
}

GeneratingModel fit_generating_model(const MatrixRef& x, const VectorRef& y, const ModelId& screened) {
  if (screened.empty()) throw Error(ErrorCode::invalid_argument, "screened predictor set is empty");
  const MatrixXd xs = select_columns(x, screened);
  GeneratingModel gm;

  ModelId local;
  try {
    local = stepwise_select(xs, y, {StepDirection::backward, kDgpStepPenalty, 1000}).selected;
    gm.route = "backward";
  } catch (const Error& e) {
    if (e.code() == ErrorCode::timeout) throw;
    log_info(std::string("backward selection failed, trying forward: ") + e.what());
    try {
      local = stepwise_select(xs, y, {StepDirection::forward, kDgpStepPenalty, 1000}).selected;
      gm.route = "forward";
      // Forward prunes candidates whose fit fails, so after a separation-driven
      // backward failure an empty result usually means the culprit was dropped.
      if (local.empty()) throw Error(ErrorCode::empty_model_selected, "forward selection kept nothing");
    } catch (const Error& e2) {
      if (e2.code() == ErrorCode::timeout) throw;
      log_info(std::string("forward selection failed, using univariate tests: ") + e2.what());
      ModelId all(screened.size());
      std::iota(all.begin(), all.end(), 0);
      local = univariate_selection(xs, y, all);
      gm.route = "univariate";
    }
  }
  for (int j : local) gm.selected.push_back(screened[j]);
  if (gm.selected.empty()) throw Error(ErrorCode::empty_model_selected, "no predictor survived selection");

  const MatrixXd xm = select_columns(x, gm.selected);
  VectorXd beta;
  bool stable = false;
  try {
    beta = fit_submodel(x, y, gm.selected).beta;
    stable = !unstable_coefficients(beta, kDgpCoefficientBound);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::timeout) throw;
  }
  if (!stable) {
    gm.separation_handled = true;
    constexpr int kGrid = 25;
    for (int i = 0; i < kGrid; ++i) {
      const double lambda = std::pow(10.0, -4.0 + 6.0 * i / (kGrid - 1));
      beta = fit_penalized(xm, y, PenaltySpec::ridge(), lambda).beta;
      gm.ridge_lambda = lambda;
      if (!unstable_coefficients(beta, kDgpCoefficientBound)) break;
    }
  }

  gm.beta = expand_coefficients(beta, gm.selected, x.cols());
  gm.pi = clipped_probs(gm.beta, x);
  gm.pseudo_r2 = std::clamp(1.0 - bernoulli_loglik(gm.pi, y) / null_loglik(y), 0.0, std::nextafter(1.0, 0.0));
  return gm;
}

GeneratingModel synthetic_model(const MatrixRef& x, const VectorRef& beta) {
  if (beta.size() != x.cols() + 1) throw Error(ErrorCode::length_mismatch, "coefficients must have length p + 1");
  GeneratingModel gm;
  for (Index j = 0; j < x.cols(); ++j)
    if (beta[j + 1] != 0.0) gm.selected.push_back(static_cast<int>(j));
  gm.beta = beta;
  gm.pi = clipped_probs(beta, x);
  gm.route = "synthetic";
  return gm;
}

VectorXd simulate_replicate(const GeneratingModel& gm, int replicate, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {"replicate", std::to_string(replicate)}));
  VectorXd y(gm.pi.size());
  for (Index i = 0; i < y.size(); ++i) y[i] = rng.bernoulli(gm.pi[i]) ? 1.0 : 0.0;
  return y;
}

std::vector<VectorXd> simulate_outcomes(const GeneratingModel& gm, int replicates, std::uint64_t seed) {
  if (replicates < 1) throw Error(ErrorCode::invalid_argument, "need at least one replicate");
  std::vector<VectorXd> out;
  out.reserve(replicates);
  for (int r = 0; r < replicates; ++r) out.push_back(simulate_replicate(gm, r, seed));
  return out;
}

std::string to_json(const GeneratingModel& gm) {
  nlohmann::ordered_json j;
  j["selected"] = gm.selected;
  j["names"] = gm.names;
  j["beta"] = std::vector<double>(gm.beta.data(), gm.beta.data() + gm.beta.size());
  j["pi"] = std::vector<double>(gm.pi.data(), gm.pi.data() + gm.pi.size());
  j["pseudo_r2"] = gm.pseudo_r2;
  j["separation_handled"] = gm.separation_handled;
  j["ridge_lambda"] = gm.ridge_lambda;
  j["route"] = gm.route;
  return j.dump(2);
}

GeneratingModel generating_model_from_json(const std::string& text) {
  GeneratingModel gm;
  try {
    const auto j = nlohmann::json::parse(text);
    gm.selected = j.at("selected").get<ModelId>();
    gm.names = j.value("names", std::vector<std::string>{});
    const auto beta = j.at("beta").get<std::vector<double>>();
    const auto pi = j.at("pi").get<std::vector<double>>();
    gm.beta = Eigen::Map<const VectorXd>(beta.data(), static_cast<Index>(beta.size()));
    gm.pi = Eigen::Map<const VectorXd>(pi.data(), static_cast<Index>(pi.size()));
    gm.pseudo_r2 = j.at("pseudo_r2").get<double>();
    gm.separation_handled = j.at("separation_handled").get<bool>();
    gm.ridge_lambda = j.value("ridge_lambda", 0.0);
    gm.route = j.value("route", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("bad generating model document: ") + e.what());
  }
  return gm;
}

}  // namespace logitbench
