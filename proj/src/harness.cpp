#include "logitbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>
#include <thread>

#include "logitbench/dataset.hpp"
#include "logitbench/deadline.hpp"
#include "logitbench/error.hpp"
#include "logitbench/log.hpp"
#include "logitbench/random.hpp"
#include "logitbench/separation.hpp"

namespace logitbench {
namespace {

using json = nlohmann::ordered_json;

struct Split {
  MatrixXd x_train, x_test;
  VectorXd y_train;
  std::vector<Index> test;
};

Split split_fold(const MatrixXd& x, const VectorXd& y, const std::vector<int>& folds, int k) {
  Split s;
  const auto train = fold_train_indices(folds, k);
  s.test = fold_test_indices(folds, k);
  s.x_train.resize(static_cast<Index>(train.size()), x.cols());
  s.y_train.resize(static_cast<Index>(train.size()));
  s.x_test.resize(static_cast<Index>(s.test.size()), x.cols());
  for (std::size_t i = 0; i < train.size(); ++i) {
    s.x_train.row(static_cast<Index>(i)) = x.row(train[i]);
    s.y_train[static_cast<Index>(i)] = y[train[i]];
  }
  for (std::size_t i = 0; i < s.test.size(); ++i) s.x_test.row(static_cast<Index>(i)) = x.row(s.test[i]);
  return s;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

MethodOutput run_method(const MethodRegistry& registry, const std::string& method, const MatrixXd& x,
                        const VectorXd& y, const std::vector<int>& folds, int eval_folds, std::uint64_t seed,
                        double timeout_seconds, const MethodSettings& settings) {
  MethodOutput out;
  const MethodFn& fn = registry.get(method);
  const auto start = std::chrono::steady_clock::now();
  try {
    ScopedDeadline deadline{std::chrono::duration<double>(timeout_seconds)};
    MethodFit full = fn(MethodContext{x, y, derive_seed(seed, {"full"}), true, settings});
    if (full.beta.size() != x.cols() + 1 || !full.beta.allFinite())
      throw Error(ErrorCode::invalid_argument, "method returned an invalid coefficient vector");
    if (full.inclusion_score.size() != x.cols() || !full.inclusion_score.allFinite())
      throw Error(ErrorCode::invalid_argument, "method returned invalid inclusion scores");
    out.beta_hat = full.beta;
    out.ci_lower = full.ci_lower;
    out.ci_upper = full.ci_upper;
    out.inclusion_score = full.inclusion_score;

    VectorXd probs = VectorXd::Constant(y.size(), -1.0);
    for (int k = 0; k < eval_folds; ++k) {
      const Split s = split_fold(x, y, folds, k);
      if (s.test.empty()) continue;
      MethodFit fit = fn(MethodContext{s.x_train, s.y_train, derive_seed(seed, {"fold", std::to_string(k)}), false,
                                       settings});
      const VectorXd p = fit.predict(s.x_test);
      if (p.size() != static_cast<Index>(s.test.size()) || !p.allFinite())
        throw Error(ErrorCode::invalid_argument, "method returned invalid held-out probabilities");
      for (std::size_t i = 0; i < s.test.size(); ++i) probs[s.test[i]] = p[static_cast<Index>(i)];
    }
    if ((probs.array() < 0.0).any()) throw Error(ErrorCode::invalid_argument, "fold assignment left rows unpredicted");
    out.test_probs = probs;
  } catch (const std::exception& e) {
    out = MethodOutput{};
    out.failed = true;
    out.error = e.what();
  } catch (...) {
    out = MethodOutput{};
    out.failed = true;
    out.error = "unknown fault";
  }
  out.cpu_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

bool any_fold_separated(const MatrixXd& x, const VectorXd& y, const std::vector<int>& folds, int eval_folds) {
  for (int k = 0; k < eval_folds; ++k) {
    const Split s = split_fold(x, y, folds, k);
    const double cases = s.y_train.sum();
    if (cases < 1.0 || cases > s.y_train.size() - 1.0) return true;
    try {
      const SeparationReport rep = detect_separation(s.x_train, s.y_train);
      if (rep.separated || rep.kind == SeparationKind::indeterminate) return true;
    } catch (const Error&) {
      return true;
    }
  }
  return false;
}

void sort_records(std::vector<ResultRecord>& records) {
  std::sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
    return std::tie(a.dataset, a.replication, a.method) < std::tie(b.dataset, b.replication, b.method);
  });
}

std::vector<ResultRecord> run_replications(const ReplicationPlan& plan, const MethodRegistry& registry) {
  if (!plan.x || !plan.gm) throw Error(ErrorCode::invalid_argument, "replication plan lacks data");
  for (const std::string& m : plan.methods) registry.get(m);
  const MatrixXd& x = *plan.x;
  const GeneratingModel& gm = *plan.gm;
  const int reps = plan.replications;

  struct Replicate {
    VectorXd y;
    std::vector<int> folds;
    bool separated = false;
  };
  std::vector<Replicate> replicates(reps);
  const std::uint64_t outcome_seed = derive_seed(plan.master_seed, {plan.dataset, "outcomes"});
  parallel_for(static_cast<std::size_t>(reps), plan.threads, [&](std::size_t r) {
    Replicate& rep = replicates[r];
    rep.y = simulate_replicate(gm, static_cast<int>(r), outcome_seed);
    rep.folds = make_folds(rep.y, plan.eval_folds,
                           derive_seed(plan.master_seed, {plan.dataset, "folds", std::to_string(r)}));
    rep.separated = any_fold_separated(x, rep.y, rep.folds, plan.eval_folds);
  });

  const std::size_t n_methods = plan.methods.size();
  std::vector<ResultRecord> records(static_cast<std::size_t>(reps) * n_methods);
  parallel_for(records.size(), plan.threads, [&](std::size_t u) {
    const int r = static_cast<int>(u / n_methods);
    const std::string& method = plan.methods[u % n_methods];
    const Replicate& rep = replicates[r];
    ResultRecord& rec = records[u];
    rec.dataset = plan.dataset;
    rec.replication = r;
    rec.method = method;
    rec.seed = derive_seed(plan.master_seed, {plan.dataset, std::to_string(r), method});
    rec.separated = rep.separated;
    const MethodOutput out = run_method(registry, method, x, rep.y, rep.folds, plan.eval_folds, rec.seed,
                                        plan.timeout_seconds, plan.settings);
    rec.cpu_seconds = out.cpu_seconds;
    rec.error = out.error;
    try {
      rec.metrics = compute_metrics(out, gm.beta, rep.y);
    } catch (const std::exception& e) {
      rec.metrics = MetricRecord{};
      rec.metrics.failed = true;
      rec.error = e.what();
    }
    rec.metrics.cpu_minutes = out.cpu_seconds / 60.0;
    if (!out.failed) {
      for (int k = 0; k < plan.eval_folds; ++k) {
        const auto test = fold_test_indices(rep.folds, k);
        double s = 0.0;
        for (Index i : test) s += (out.test_probs[i] - rep.y[i]) * (out.test_probs[i] - rep.y[i]);
        rec.fold_sizes.push_back(static_cast<int>(test.size()));
        rec.fold_brier.push_back(test.empty() ? 0.0 : s / static_cast<double>(test.size()));
      }
    }
    if (rec.metrics.failed) log_info(plan.dataset + " rep " + std::to_string(r) + " " + method + " failed: " + rec.error);
  });
  sort_records(records);
  return records;
}

std::string record_json(const ResultRecord& r) {
  json j;
  j["dataset"] = r.dataset;
  j["replication"] = r.replication;
  j["method"] = r.method;
  j["seed"] = r.seed;
  j["separated"] = r.separated;
  j["failed"] = r.metrics.failed;
  j["error"] = r.error;
  j["rmse"] = optional_json(r.metrics.rmse);
  j["mis"] = optional_json(r.metrics.mis);
  j["auprc"] = optional_json(r.metrics.auprc);
  j["brier"] = optional_json(r.metrics.brier);
  j["fold_brier"] = r.fold_brier;
  j["fold_sizes"] = r.fold_sizes;
  return j.dump();
}

ResultRecord parse_record_json(const std::string& line) {
  ResultRecord r;
  try {
    const auto j = nlohmann::json::parse(line);
    r.dataset = j.at("dataset").get<std::string>();
    r.replication = j.at("replication").get<int>();
    r.method = j.at("method").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.separated = j.at("separated").get<bool>();
    r.metrics.failed = j.at("failed").get<bool>();
    r.error = j.value("error", std::string{});
    r.metrics.rmse = optional_from(j, "rmse");
    r.metrics.mis = optional_from(j, "mis");
    r.metrics.auprc = optional_from(j, "auprc");
    r.metrics.brier = optional_from(j, "brier");
    r.fold_brier = j.value("fold_brier", std::vector<double>{});
    r.fold_sizes = j.value("fold_sizes", std::vector<int>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("bad result record: ") + e.what());
  }
  return r;
}

SimulationSummary run_simulation(const SimulationConfig& config, const std::filesystem::path& out_dir,
                                 const MethodRegistry& registry) {
  config.validate();
  for (const std::string& m : config.methods)
    if (!registry.contains(m)) throw Error(ErrorCode::config_error, "unknown method " + m);
  std::filesystem::create_directories(out_dir);

  MethodSettings settings;
  settings.enumeration_threshold = config.enumeration_threshold;
  settings.posterior_draws = config.posterior_draws;
  settings.mc3_iterations = config.mc3_iterations;
  settings.tuning_folds = config.tuning_folds;

  SimulationSummary summary;
  summary.archive = out_dir;
  std::vector<ResultRecord> all;
  json manifest;
  manifest["format"] = "logitbench-archive-1";
  manifest["config_hash"] = fnv1a64(config.canonical_json());
  manifest["config"] = json::parse(config.canonical_json());
  json datasets = json::array();

  for (const DatasetSpec& spec : config.datasets) {
    LoadOptions opts;
    opts.categorical = spec.categorical;
    const Dataset data = process_predictors(load_dataset(spec.path, spec.outcome, opts));
    json entry;
    entry["name"] = spec.name;
    entry["n"] = data.n();
    entry["p"] = data.p();
    GeneratingModel gm;
    try {
      const ModelId screened = screen_variables(data.x(), data.y());
      gm = fit_generating_model(data.x(), data.y(), screened);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::empty_model_selected) throw;
      summary.skipped.push_back(spec.name + ": " + e.what());
      log_warn("skipping dataset " + spec.name + ": " + e.what());
      entry["status"] = std::string("skipped: ") + e.what();
      datasets.push_back(entry);
      continue;
    }
    gm.names = data.names();
    write_text(out_dir / ("dgm_" + spec.name + ".json"), to_json(gm) + "\n");

    ReplicationPlan plan;
    plan.dataset = spec.name;
    plan.x = &data.x();
    plan.gm = &gm;
    plan.methods = config.methods;
    plan.replications = config.replications;
    plan.eval_folds = config.eval_folds;
    plan.master_seed = config.master_seed;
    plan.timeout_seconds = config.timeout_seconds;
    plan.settings = settings;
    plan.threads = config.threads;
    std::vector<ResultRecord> recs = run_replications(plan, registry);

    int separated = 0;
    for (const ResultRecord& r : recs)
      if (r.method == config.methods.front() && r.separated) ++separated;
    entry["status"] = "ok";
    entry["selected"] = gm.selected;
    entry["pseudo_r2"] = gm.pseudo_r2;
    entry["separation_handled"] = gm.separation_handled;
    entry["separated_replicates"] = separated;
    datasets.push_back(entry);
    all.insert(all.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  sort_records(all);
  manifest["datasets"] = datasets;
  manifest["records"] = all.size();

  std::string results, timing;
  for (const ResultRecord& r : all) {
    results += record_json(r) + "\n";
    json t;
    t["dataset"] = r.dataset;
    t["replication"] = r.replication;
    t["method"] = r.method;
    t["cpu_seconds"] = r.cpu_seconds;
    timing += t.dump() + "\n";
  }
  write_text(out_dir / "results.jsonl", results);
  write_text(out_dir / "timing.jsonl", timing);
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  summary.records = all.size();
  return summary;
}

Archive read_archive(const std::filesystem::path& dir) {
  Archive a;
  a.manifest = read_text(dir / "manifest.json");
  std::istringstream in(read_text(dir / "results.jsonl"));
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) a.records.push_back(parse_record_json(line));
  if (std::filesystem::exists(dir / "timing.jsonl")) {
    std::map<std::tuple<std::string, int, std::string>, double> cpu;
    std::istringstream tin(read_text(dir / "timing.jsonl"));
    while (std::getline(tin, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      cpu[{j.at("dataset").get<std::string>(), j.at("replication").get<int>(), j.at("method").get<std::string>()}] =
          j.at("cpu_seconds").get<double>();
    }
    for (ResultRecord& r : a.records) {
      auto it = cpu.find({r.dataset, r.replication, r.method});
      if (it != cpu.end()) {
        r.cpu_seconds = it->second;
        r.metrics.cpu_minutes = it->second / 60.0;
      }
    }
  }
  return a;
}

std::vector<ScoreInput> to_score_inputs(const std::vector<ResultRecord>& records) {
  std::vector<ScoreInput> out;
  out.reserve(records.size());
  for (const ResultRecord& r : records) out.push_back({r.dataset, r.replication, r.method, r.metrics, r.separated});
  return out;
}

}  // namespace logitbench
