#include "logitbench/bma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>

#include "logitbench/deadline.hpp"
#include "logitbench/error.hpp"
#include "logitbench/log.hpp"
#include "logitbench/quadrature.hpp"
#include "logitbench/random.hpp"

namespace logitbench {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogG_lo = -10.0;
constexpr double kLogG_hi = 20.0;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * M_PI);

double log_choose(int p, int k) { return std::lgamma(p + 1.0) - std::lgamma(k + 1.0) - std::lgamma(p - k + 1.0); }

double logsumexp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

MatrixXd model_design(const MatrixRef& x, const ModelId& model) {
  MatrixXd z(x.rows(), model.size() + 1);
  z.col(0).setOnes();
  for (std::size_t j = 0; j < model.size(); ++j) z.col(j + 1) = x.col(model[j]);
  return z;
}

// Everything about a model that does not depend on g.
struct ModelData {
  MatrixXd design;
  MatrixXd scale;  // X_c' X_c / 4
  double logdet_scale = 0.0;
};

ModelData model_data(const MatrixRef& x, const ModelId& model) {
  for (std::size_t j = 0; j < model.size(); ++j)
    if (model[j] < 0 || model[j] >= x.cols() || (j > 0 && model[j] <= model[j - 1]))
      throw Error(ErrorCode::invalid_argument, "model indices must be sorted, unique and in range");
  ModelData d;
  d.design = model_design(x, model);
  const Index k = static_cast<Index>(model.size());
  if (k == 0) return d;
  MatrixXd xc = d.design.rightCols(k);
  xc.rowwise() -= xc.colwise().mean();
  d.scale = xc.transpose() * xc / 4.0;
  Eigen::LLT<MatrixXd> llt(d.scale);
  const double smallest = d.scale.diagonal().minCoeff();
  if (llt.info() != Eigen::Success || !(smallest > 0.0))
    throw Error(ErrorCode::rank_deficient, "model design is rank deficient");
  const VectorXd diag = MatrixXd(llt.matrixL()).diagonal();
  if (diag.minCoeff() <= 1e-8 * std::sqrt(d.scale.diagonal().maxCoeff()))
    throw Error(ErrorCode::rank_deficient, "model design is rank deficient");
  d.logdet_scale = 2.0 * diag.array().log().sum();
  return d;
}

double initial_intercept(const VectorRef& y) {
  const double ybar = y.mean();
  if (ybar <= 0.0 || ybar >= 1.0) return 0.0;
  return std::log(ybar / (1.0 - ybar));
}

LaplaceFit laplace(const ModelData& d, const VectorRef& y, double g, const VectorXd* warm) {
  const Index k = d.design.cols() - 1;
  const MatrixXd lambda = k > 0 ? MatrixXd(d.scale / g) : MatrixXd();
  auto objective = [&](const VectorXd& beta, LogLik* out) {
    LogLik ll = loglik_grad_hess(beta, d.design, y);
    double v = ll.value;
    if (k > 0) {
      const VectorXd b = beta.tail(k);
      const VectorXd lb = lambda * b;
      v -= 0.5 * b.dot(lb);
      if (out) {
        ll.gradient.tail(k) -= lb;
        ll.hessian.bottomRightCorner(k, k) -= lambda;
      }
    }
    if (out) *out = std::move(ll);
    return v;
  };

  VectorXd beta = VectorXd::Zero(k + 1);
  if (warm && warm->size() == k + 1 && warm->allFinite())
    beta = *warm;
  else
    beta[0] = initial_intercept(y);

  LogLik cur;
  double f = objective(beta, &cur);
  for (int iter = 0;; ++iter) {
    check_deadline();
    if (cur.gradient.lpNorm<Eigen::Infinity>() <= 1e-8) break;
    if (iter >= 100) throw Error(ErrorCode::no_convergence, "posterior mode search did not converge");
    const MatrixXd h = -cur.hessian;
    Eigen::LDLT<MatrixXd> ldlt(h);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::no_convergence, "posterior Hessian factorization failed");
    const VectorXd step = ldlt.solve(cur.gradient);
    double t = 1.0;
    VectorXd trial = beta + step;
    double ft = objective(trial, nullptr);
    int halvings = 0;
    const double slack = 1e-12 * (1.0 + std::abs(f));
    while (!(ft >= f - slack) && halvings < 40) {
      t *= 0.5;
      trial = beta + t * step;
      ft = objective(trial, nullptr);
      ++halvings;
    }
    if (!(ft >= f - slack)) {
      if (cur.gradient.lpNorm<Eigen::Infinity>() <= 1e-5) break;  // at floating-point resolution
      throw Error(ErrorCode::no_convergence, "posterior mode line search failed");
    }
    beta = trial;
    f = objective(beta, &cur);
  }

  const MatrixXd h = -cur.hessian;
  Eigen::LLT<MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::no_convergence, "posterior Hessian not positive definite");
  LaplaceFit out;
  const double logdet_h = 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  double logdet_lambda = 0.0;
  if (k > 0) logdet_lambda = d.logdet_scale - k * std::log(g);
  out.log_marginal = f + 0.5 * logdet_lambda + kHalfLog2Pi - 0.5 * logdet_h;
  out.mode = beta;
  out.covariance = llt.solve(MatrixXd::Identity(k + 1, k + 1));
  return out;
}

ModelResult from_laplace(const ModelId& model, LaplaceFit fit, double g) {
  ModelResult r;
  r.model = model;
  r.log_marginal = fit.log_marginal;
  r.g = g;
  r.mean = std::move(fit.mode);
  r.covariance = std::move(fit.covariance);
  return r;
}

ModelResult eb_local_model(const ModelData& d, const VectorRef& y, const ModelId& model) {
  VectorXd warm;
  auto f = [&](double lg) {
    try {
      LaplaceFit fit = laplace(d, y, std::exp(lg), warm.size() ? &warm : nullptr);
      warm = fit.mode;
      return fit.log_marginal;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::timeout) throw;
      warm.resize(0);
      return kNegInf;
    }
  };
  const Maximum best = maximize_scalar(f, kLogG_lo, kLogG_hi);
  if (!std::isfinite(best.value)) throw Error(ErrorCode::no_convergence, "empirical Bayes search found no finite marginal");
  const double g = std::exp(best.x);
  return from_laplace(model, laplace(d, y, g, nullptr), g);
}

// Integrates the fixed-g marginal over the mixing density in u = 1/(1+g). The
// map u = u_max * t^2 (3 - 2t) flattens the endpoint behaviour of the densities.
ModelResult mixture_model(const ModelData& d, const VectorRef& y, const ModelId& model, const MixtureDensity& density) {
  const int n = static_cast<int>(y.size());
  const int k = static_cast<int>(model.size());
  if (k == 0) return from_laplace(model, laplace(d, y, 1.0, nullptr), 0.0);

  const double u_max = mixture_u_max(density, n, k);
  const GaussRule& rule = gauss_legendre(64);
  struct Node {
    double log_value;
    double weight;
    LaplaceFit fit;
  };
  auto evaluate = [&](int panels) {
    std::vector<Node> nodes;
    nodes.reserve(panels * rule.nodes.size());
    const double width = 1.0 / panels;
    VectorXd warm;
    for (int p = 0; p < panels; ++p) {
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = p * width + width / 2.0 * (1.0 + rule.nodes[q]);
        const double u = u_max * t * t * (3.0 - 2.0 * t);
        const double du = u_max * 6.0 * t * (1.0 - t);
        Node node{kNegInf, rule.weights[q] * width / 2.0, {}};
        const double lp = mixture_log_density_u(density, u, n, k);
        if (std::isfinite(lp) && u > 0.0 && du > 0.0) {
          try {
            node.fit = laplace(d, y, (1.0 - u) / u, warm.size() ? &warm : nullptr);
            node.log_value = node.fit.log_marginal + lp + std::log(du);
            warm = node.fit.mode;
          } catch (const Error& e) {
            if (e.code() == ErrorCode::timeout) throw;
            warm.resize(0);
          }
        }
        nodes.push_back(std::move(node));
      }
    }
    return nodes;
  };
  auto log_integral = [](const std::vector<Node>& nodes) {
    std::vector<double> terms;
    terms.reserve(nodes.size());
    for (const Node& nd : nodes) terms.push_back(nd.log_value + std::log(nd.weight));
    return logsumexp(terms);
  };

  int panels = 1;
  std::vector<Node> nodes = evaluate(panels);
  double value = log_integral(nodes);
  for (; panels < 64;) {
    panels *= 2;
    std::vector<Node> finer = evaluate(panels);
    const double next = log_integral(finer);
    nodes = std::move(finer);
    const bool done = std::isfinite(next) && std::isfinite(value) && std::abs(next - value) < 1e-8;
    value = next;
    if (done) break;
  }
  if (!std::isfinite(value)) throw Error(ErrorCode::no_convergence, "mixture marginal is not finite");

  ModelResult r;
  r.model = model;
  r.log_marginal = value;
  r.mean = VectorXd::Zero(k + 1);
  MatrixXd second = MatrixXd::Zero(k + 1, k + 1);
  for (const Node& nd : nodes) {
    if (!std::isfinite(nd.log_value)) continue;
    const double w = std::exp(nd.log_value + std::log(nd.weight) - value);
    r.mean += w * nd.fit.mode;
    second += w * (nd.fit.covariance + nd.fit.mode * nd.fit.mode.transpose());
  }
  r.covariance = second - r.mean * r.mean.transpose();
  r.covariance = 0.5 * (r.covariance + r.covariance.transpose());
  return r;
}

ModelResult information_model(const MatrixRef& x, const VectorRef& y, const ModelId& model, bool bic) {
  MatrixXd xm(x.rows(), model.size());
  for (std::size_t j = 0; j < model.size(); ++j) xm.col(j) = x.col(model[j]);
  FitResult fit = fit_mle(xm, y, true);
  if (!fit.converged) throw Error(ErrorCode::no_convergence, "maximum likelihood did not converge");
  const double params = static_cast<double>(model.size() + 1);
  ModelResult r;
  r.model = model;
  r.log_marginal = bic ? fit.loglik - params / 2.0 * std::log(static_cast<double>(y.size())) : fit.loglik - params;
  r.mean = fit.beta;
  r.covariance = fit.covariance;
  return r;
}

ModelId mask_model(std::uint64_t mask, int p) {
  ModelId m;
  for (int j = 0; j < p; ++j)
    if (mask >> j & 1U) m.push_back(j);
  return m;
}

BmaPosterior finish(std::vector<ModelResult> models, Index p, int failed, bool enumerated) {
  if (models.empty()) throw Error(ErrorCode::all_models_failed, "no model produced a finite marginal likelihood");
  std::vector<double> lw;
  lw.reserve(models.size());
  for (const ModelResult& m : models) lw.push_back(m.log_marginal + m.log_prior);
  const std::vector<double> probs = normalize_log_weights(lw);
  BmaPosterior post;
  post.p = p;
  post.failed_models = failed;
  post.enumerated = enumerated;
  post.inclusion_probs = VectorXd::Zero(p);
  for (std::size_t i = 0; i < models.size(); ++i) {
    models[i].probability = probs[i];
    for (int j : models[i].model) post.inclusion_probs[j] += probs[i];
  }
  post.inclusion_probs = post.inclusion_probs.cwiseMin(1.0);
  post.models = std::move(models);
  return post;
}

}  // namespace

double model_log_prior(int model_size, int p, int n) {
  if (model_size < 0 || model_size > p) throw Error(ErrorCode::invalid_argument, "model size outside 0..p");
  const int largest = std::min(p, n - 3);
  if (largest < 0 || model_size > largest) return kNegInf;
  return -std::log(static_cast<double>(largest + 1)) - log_choose(p, model_size);
}

LaplaceFit laplace_fixed_g(const MatrixRef& x, const VectorRef& y, const ModelId& model, double g,
                           const VectorXd* warm_start) {
  if (!(g > 0.0)) throw Error(ErrorCode::invalid_argument, "g must be positive");
  if (x.rows() != y.size()) throw Error(ErrorCode::length_mismatch, "design rows and outcome length differ");
  return laplace(model_data(x, model), y, g, warm_start);
}

ModelResult evaluate_model(const MatrixRef& x, const VectorRef& y, const ModelId& model, const GPriorSpec& prior) {
  prior.validate();
  if (x.rows() != y.size()) throw Error(ErrorCode::length_mismatch, "design rows and outcome length differ");
  ModelResult r;
  switch (prior.kind) {
    case GPriorKind::aic:
    case GPriorKind::bic:
      r = information_model(x, y, model, prior.kind == GPriorKind::bic);
      break;
    case GPriorKind::fixed_g:
      r = from_laplace(model, laplace(model_data(x, model), y, prior.g, nullptr), prior.g);
      break;
    case GPriorKind::eb_local:
      r = eb_local_model(model_data(x, model), y, model);
      break;
    case GPriorKind::mixture_g:
      r = mixture_model(model_data(x, model), y, model, prior.mixture);
      break;
    case GPriorKind::eb_global:
      throw Error(ErrorCode::invalid_argument, "eb_global needs the whole model space");
  }
  r.log_prior = model_log_prior(static_cast<int>(model.size()), static_cast<int>(x.cols()), static_cast<int>(x.rows()));
  return r;
}

double eb_global_fit(const MatrixRef& x, const VectorRef& y, const std::vector<ModelId>& models) {
  const int p = static_cast<int>(x.cols()), n = static_cast<int>(x.rows());
  std::vector<ModelData> data;
  std::vector<double> log_priors;
  for (const ModelId& m : models) {
    const double lp = model_log_prior(static_cast<int>(m.size()), p, n);
    if (!std::isfinite(lp)) continue;
    try {
      data.push_back(model_data(x, m));
      log_priors.push_back(lp);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::timeout) throw;
    }
  }
  if (data.empty()) throw Error(ErrorCode::all_models_failed, "no admissible model for empirical Bayes");
  std::vector<VectorXd> warm(data.size());
  auto objective = [&](double lg) {
    std::vector<double> terms(data.size(), kNegInf);
    for (std::size_t i = 0; i < data.size(); ++i) {
      try {
        LaplaceFit fit = laplace(data[i], y, std::exp(lg), warm[i].size() ? &warm[i] : nullptr);
        warm[i] = fit.mode;
        terms[i] = log_priors[i] + fit.log_marginal;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::timeout) throw;
        warm[i].resize(0);
      }
    }
    return logsumexp(terms);
  };
  const Maximum best = maximize_scalar(objective, kLogG_lo, kLogG_hi);
  if (!std::isfinite(best.value)) throw Error(ErrorCode::all_models_failed, "empirical Bayes objective is not finite");
  return std::exp(best.x);
}

std::vector<double> normalize_log_weights(const std::vector<double>& log_weights) {
  const double total = logsumexp(log_weights);
  std::vector<double> out(log_weights.size(), 0.0);
  if (!std::isfinite(total)) return out;
  for (std::size_t i = 0; i < log_weights.size(); ++i) out[i] = std::exp(log_weights[i] - total);
  return out;
}

BmaPosterior enumerate_posterior(const MatrixRef& x, const VectorRef& y, const GPriorSpec& prior,
                                 const BmaOptions& options) {
  const int p = static_cast<int>(x.cols()), n = static_cast<int>(x.rows());
  if (p > options.enumeration_threshold || p > 62)
    throw Error(ErrorCode::enumeration_required, "too many predictors to enumerate the model space");
  if (x.rows() != y.size()) throw Error(ErrorCode::length_mismatch, "design rows and outcome length differ");

  std::vector<ModelId> admissible;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
    ModelId m = mask_model(mask, p);
    if (std::isfinite(model_log_prior(static_cast<int>(m.size()), p, n))) admissible.push_back(std::move(m));
  }

  GPriorSpec effective = prior;
  double shared_g = 0.0;
  if (prior.kind == GPriorKind::eb_global) {
    shared_g = eb_global_fit(x, y, admissible);
    effective = GPriorSpec::fixed(shared_g);
  }

  std::vector<ModelResult> results;
  int failed = 0;
  for (const ModelId& m : admissible) {
    check_deadline();
    try {
      results.push_back(evaluate_model(x, y, m, effective));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::timeout) throw;
      ++failed;
      log_debug(std::string("model excluded: ") + e.what());
    }
  }
  BmaPosterior post = finish(std::move(results), p, failed, true);
  post.shared_g = shared_g;
  return post;
}

BmaPosterior mc3_posterior(const MatrixRef& x, const VectorRef& y, const GPriorSpec& prior, int iterations,
                           std::uint64_t seed) {
  if (iterations < 1000) throw Error(ErrorCode::invalid_argument, "MC3 needs at least 1000 iterations");
  if (prior.kind == GPriorKind::eb_global)
    throw Error(ErrorCode::enumeration_required, "global empirical Bayes needs an enumerated model space");
  const int p = static_cast<int>(x.cols());
  if (p < 1) throw Error(ErrorCode::invalid_argument, "MC3 needs at least one predictor");

  std::map<ModelId, std::optional<ModelResult>> cache;
  int failed = 0;
  auto log_post = [&](const ModelId& m) {
    auto it = cache.find(m);
    if (it == cache.end()) {
      std::optional<ModelResult> r;
      const double lp = model_log_prior(static_cast<int>(m.size()), p, static_cast<int>(x.rows()));
      if (std::isfinite(lp)) {
        try {
          r = evaluate_model(x, y, m, prior);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::timeout) throw;
          ++failed;
          log_debug(std::string("model excluded: ") + e.what());
        }
      }
      it = cache.emplace(m, std::move(r)).first;
    }
    return it->second ? it->second->log_marginal + it->second->log_prior : kNegInf;
  };

  Rng rng(seed);
  ModelId current;
  double current_lp = log_post(current);
  std::set<ModelId> visited{current};
  for (int it = 0; it < iterations; ++it) {
    check_deadline();
    const int j = static_cast<int>(rng.index(static_cast<std::size_t>(p)));
    ModelId proposal = current;
    auto pos = std::lower_bound(proposal.begin(), proposal.end(), j);
    if (pos != proposal.end() && *pos == j)
      proposal.erase(pos);
    else
      proposal.insert(pos, j);
    const double proposal_lp = log_post(proposal);
    const double u = rng.uniform();
    if (!std::isfinite(proposal_lp)) continue;
    if (!std::isfinite(current_lp) || std::log(u) < proposal_lp - current_lp) {
      current = std::move(proposal);
      current_lp = proposal_lp;
      visited.insert(current);
    }
  }

  std::vector<ModelResult> results;
  for (const ModelId& id : visited) {
    const auto& r = cache.at(id);
    if (r) results.push_back(*r);
  }
  return finish(std::move(results), p, failed, false);
}

BmaPosterior fit_bma(const MatrixRef& x, const VectorRef& y, const GPriorSpec& prior, std::uint64_t seed,
                     const BmaOptions& options) {
  if (x.cols() <= options.enumeration_threshold) return enumerate_posterior(x, y, prior, options);
  return mc3_posterior(x, y, prior, options.mc3_iterations, seed);
}

namespace {

VectorXd expand(const ModelResult& m, Index p) {
  VectorXd full = VectorXd::Zero(p + 1);
  full[0] = m.mean[0];
  for (std::size_t j = 0; j < m.model.size(); ++j) full[m.model[j] + 1] = m.mean[j + 1];
  return full;
}

MatrixXd covariance_root(const MatrixXd& cov) {
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double h = (v.size() - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

}  // namespace

BmaSummary summarize_bma(const BmaPosterior& post, int draws, std::uint64_t seed, double level) {
  if (post.models.empty()) throw Error(ErrorCode::invalid_argument, "empty posterior");
  if (draws < 2) throw Error(ErrorCode::invalid_argument, "need at least two posterior draws");
  const Index p = post.p;
  BmaSummary s;
  s.avg_beta = VectorXd::Zero(p + 1);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const ModelResult& m : post.models) {
    s.avg_beta += m.probability * expand(m, p);
    acc += m.probability;
    cumulative.push_back(acc);
  }
  s.inclusion = post.inclusion_probs;

  std::vector<MatrixXd> roots(post.models.size());
  std::vector<std::vector<double>> samples(p + 1, std::vector<double>(draws, 0.0));
  Rng rng(seed);
  for (int d = 0; d < draws; ++d) {
    if (d % 256 == 0) check_deadline();
    const double u = rng.uniform() * acc;
    std::size_t idx = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    idx = std::min(idx, post.models.size() - 1);
    const ModelResult& m = post.models[idx];
    if (roots[idx].size() == 0) roots[idx] = covariance_root(m.covariance);
    VectorXd z(m.mean.size());
    for (Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const VectorXd b = m.mean + roots[idx] * z;
    samples[0][d] = b[0];
    for (std::size_t j = 0; j < m.model.size(); ++j) samples[m.model[j] + 1][d] = b[j + 1];
  }
  s.ci_lower.resize(p + 1);
  s.ci_upper.resize(p + 1);
  const double tail = (1.0 - level) / 2.0;
  for (Index j = 0; j <= p; ++j) {
    std::sort(samples[j].begin(), samples[j].end());
    s.ci_lower[j] = quantile_sorted(samples[j], tail);
    s.ci_upper[j] = quantile_sorted(samples[j], 1.0 - tail);
  }
  return s;
}

VectorXd bma_predict(const BmaPosterior& post, const MatrixRef& x_new) {
  if (x_new.cols() != post.p) throw Error(ErrorCode::length_mismatch, "prediction design has the wrong width");
  VectorXd probs = VectorXd::Zero(x_new.rows());
  for (const ModelResult& m : post.models) probs += m.probability * predict_probs(expand(m, post.p), x_new);
  return probs.cwiseMax(std::numeric_limits<double>::min()).cwiseMin(1.0 - 0x1.0p-53);
}

}  // namespace logitbench
