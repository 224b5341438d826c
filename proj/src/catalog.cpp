#include "logitbench/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "logitbench/bma.hpp"
#include "logitbench/error.hpp"
#include "logitbench/penalized.hpp"
#include "logitbench/selection.hpp"

namespace logitbench {
namespace {

std::function<VectorXd(const MatrixRef&)> linear_predict(VectorXd beta) {
  return [beta = std::move(beta)](const MatrixRef& x) { return predict_probs(beta, x); };
}

MethodFn pvalue_method(double threshold) {
  return [threshold](const MethodContext& ctx) {
    SelectionResult r = pvalue_select(ctx.x, ctx.y, threshold);
    MethodFit f;
    f.beta = r.beta;
    f.ci_lower = r.ci_lower;
    f.ci_upper = r.ci_upper;
    f.inclusion_score = r.inclusion_score;
    f.predict = linear_predict(r.beta);
    return f;
  };
}

MethodFn stepwise_method(StepDirection direction) {
  return [direction](const MethodContext& ctx) {
    SelectionResult r = stepwise_select(ctx.x, ctx.y, {direction, 2.0, 1000});
    MethodFit f;
    f.beta = r.beta;
    f.ci_lower = r.ci_lower;
    f.ci_upper = r.ci_upper;
    f.inclusion_score = r.inclusion_score;
    f.predict = linear_predict(r.beta);
    return f;
  };
}

MethodFn penalized_method(PenaltySpec spec) {
  return [spec](const MethodContext& ctx) {
    CvOptions opts;
    opts.folds = ctx.settings.tuning_folds;
    const PathResult path = cv_select_lambda(ctx.x, ctx.y, spec, ctx.seed, opts);
    MethodFit f;
    f.beta = path.coefs.col(path.selected_index);
    f.inclusion_score = f.beta.tail(ctx.x.cols()).cwiseAbs();
    f.predict = linear_predict(f.beta);
    return f;
  };
}

MethodFit firth_method(const MethodContext& ctx) {
  const FitResult fit = fit_firth(ctx.x, ctx.y, true);
  MethodFit f;
  f.beta = fit.beta;
  f.ci_lower = fit.ci_lower();
  f.ci_upper = fit.ci_upper();
  f.inclusion_score = VectorXd::Ones(ctx.x.cols()) - fit.pvalues.tail(ctx.x.cols());
  f.predict = linear_predict(fit.beta);
  return f;
}

MethodFn bma_method(std::function<GPriorSpec(int n, int p)> make_prior) {
  return [make_prior](const MethodContext& ctx) {
    const GPriorSpec prior = make_prior(static_cast<int>(ctx.x.rows()), static_cast<int>(ctx.x.cols()));
    BmaOptions opts;
    opts.enumeration_threshold = ctx.settings.enumeration_threshold;
    opts.mc3_iterations = ctx.settings.mc3_iterations;
    auto post = std::make_shared<BmaPosterior>(fit_bma(ctx.x, ctx.y, prior, ctx.seed, opts));
    MethodFit f;
    if (ctx.inference) {
      const BmaSummary s = summarize_bma(*post, ctx.settings.posterior_draws, ctx.seed ^ 0x9e3779b97f4a7c15ULL);
      f.beta = s.avg_beta;
      f.ci_lower = s.ci_lower;
      f.ci_upper = s.ci_upper;
      f.inclusion_score = s.inclusion;
    } else {
      f.beta = VectorXd::Zero(ctx.x.cols() + 1);
      f.inclusion_score = post->inclusion_probs;
    }
    f.predict = [post](const MatrixRef& x) { return bma_predict(*post, x); };
    return f;
  };
}

}  // namespace

void MethodRegistry::add(const std::string& name, MethodFn fn) {
  if (name.empty()) throw Error(ErrorCode::invalid_argument, "method name is empty");
  methods_[name] = std::move(fn);
}

const MethodFn& MethodRegistry::get(const std::string& name) const {
  auto it = methods_.find(name);
  if (it == methods_.end()) throw Error(ErrorCode::unknown_method, "unknown method " + name);
  return it->second;
}

std::vector<std::string> MethodRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, fn] : methods_) out.push_back(name);
  return out;
}

MethodRegistry MethodRegistry::builtin() {
  MethodRegistry r;
  r.add("pvalue", pvalue_method(1.0));
  r.add("p05", pvalue_method(0.05));
  r.add("p005", pvalue_method(0.005));
  r.add("forward", stepwise_method(StepDirection::forward));
  r.add("backward", stepwise_method(StepDirection::backward));
  r.add("both", stepwise_method(StepDirection::both));
  r.add("ridge", penalized_method(PenaltySpec::ridge()));
  r.add("elastic_net", penalized_method(PenaltySpec::elastic_net(0.5)));
  r.add("lasso", penalized_method(PenaltySpec::lasso()));
  r.add("mcp", penalized_method(PenaltySpec::mcp()));
  r.add("scad", penalized_method(PenaltySpec::scad()));
  r.add("firth", firth_method);
  r.add("bma_g4", bma_method([](int, int) { return GPriorSpec::fixed(4.0); }));
  r.add("bma_g_sqrt_n", bma_method([](int n, int) { return GPriorSpec::fixed(std::sqrt(static_cast<double>(n))); }));
  r.add("bma_g_benchmark", bma_method([](int n, int p) {
          return GPriorSpec::fixed(std::max(static_cast<double>(n), static_cast<double>(p) * p));
        }));
  r.add("bma_hyper_g", bma_method([](int, int) { return GPriorSpec::hyper_g(3.0); }));
  r.add("bma_hyper_g_n", bma_method([](int, int) { return GPriorSpec::hyper_g_over_n(3.0); }));
  r.add("bma_beta_prime", bma_method([](int, int) { return GPriorSpec::beta_prime(); }));
  r.add("bma_cch", bma_method([](int n, int) { return GPriorSpec::cch(1.0, static_cast<double>(n), 0.0); }));
  r.add("bma_robust", bma_method([](int, int) { return GPriorSpec::robust(); }));
  r.add("bma_intrinsic", bma_method([](int, int) { return GPriorSpec::intrinsic(); }));
  r.add("bma_eb_local", bma_method([](int, int) { return GPriorSpec::eb_local(); }));
  r.add("bma_eb_global", bma_method([](int, int) { return GPriorSpec::eb_global(); }));
  r.add("bma_aic", bma_method([](int, int) { return GPriorSpec::aic(); }));
  r.add("bma_bic", bma_method([](int, int) { return GPriorSpec::bic(); }));
  return r;
}

}  // namespace logitbench
