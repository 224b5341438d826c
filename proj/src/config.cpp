#include "logitbench/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <variant>

#include "logitbench/error.hpp"

namespace logitbench {
namespace {

using Value = std::variant<std::string, long long, double, bool, std::vector<std::string>>;

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorCode::config_error, "line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Parses a basic quoted string starting at s[pos] == '"'; advances pos past the closing quote.
std::string parse_string(const std::string& s, std::size_t& pos, int line) {
  std::string out;
  ++pos;
  while (pos < s.size() && s[pos] != '"') {
    if (s[pos] == '\\' && pos + 1 < s.size()) {
      ++pos;
      switch (s[pos]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: out += s[pos];
      }
    } else {
      out += s[pos];
    }
    ++pos;
  }
  if (pos >= s.size()) fail(line, "unterminated string");
  ++pos;
  return out;
}

std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && in_string) {
      ++i;
      continue;
    }
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

Value parse_value(const std::string& raw, int line) {
  const std::string v = trim(raw);
  if (v.empty()) fail(line, "missing value");
  if (v[0] == '"') {
    std::size_t pos = 0;
    std::string s = parse_string(v, pos, line);
    if (!trim(v.substr(pos)).empty()) fail(line, "trailing characters after string");
    return s;
  }
  if (v[0] == '[') {
    std::vector<std::string> items;
    std::size_t pos = 1;
    for (;;) {
      while (pos < v.size() && (std::isspace(static_cast<unsigned char>(v[pos])) || v[pos] == ',')) ++pos;
      if (pos >= v.size()) fail(line, "unterminated array");
      if (v[pos] == ']') break;
      if (v[pos] != '"') fail(line, "arrays may only hold strings");
      items.push_back(parse_string(v, pos, line));
    }
    if (!trim(v.substr(pos + 1)).empty()) fail(line, "trailing characters after array");
    return items;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::string digits;
  for (char c : v)
    if (c != '_') digits += c;
  long long i = 0;
  auto [iptr, iec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
  if (iec == std::errc() && iptr == digits.data() + digits.size()) return i;
  double d = 0.0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) fail(line, "cannot parse value '" + v + "'");
  return d;
}

double as_number(const Value& v, const std::string& key, int line) {
  if (auto d = std::get_if<double>(&v)) return *d;
  if (auto i = std::get_if<long long>(&v)) return static_cast<double>(*i);
  fail(line, key + " must be a number");
}

long long as_integer(const Value& v, const std::string& key, int line) {
  if (auto i = std::get_if<long long>(&v)) return *i;
  fail(line, key + " must be an integer");
}

std::string as_string(const Value& v, const std::string& key, int line) {
  if (auto s = std::get_if<std::string>(&v)) return *s;
  fail(line, key + " must be a string");
}

std::vector<std::string> as_list(const Value& v, const std::string& key, int line) {
  if (auto s = std::get_if<std::vector<std::string>>(&v)) return *s;
  fail(line, key + " must be an array of strings");
}

}  // namespace

void SimulationConfig::validate() const {
  if (datasets.empty()) throw Error(ErrorCode::config_error, "no [[dataset]] entries");
  std::set<std::string> names;
  for (const DatasetSpec& d : datasets) {
    if (d.name.empty() || d.path.empty() || d.outcome.empty())
      throw Error(ErrorCode::config_error, "every dataset needs name, path and outcome");
    if (!names.insert(d.name).second) throw Error(ErrorCode::config_error, "duplicate dataset name " + d.name);
  }
  if (methods.empty()) throw Error(ErrorCode::config_error, "methods list is empty");
  std::set<std::string> seen;
  for (const std::string& m : methods)
    if (!seen.insert(m).second) throw Error(ErrorCode::config_error, "duplicate method " + m);
  if (replications < 1) throw Error(ErrorCode::config_error, "replications must be >= 1");
  if (eval_folds < 2) throw Error(ErrorCode::config_error, "eval_folds must be >= 2");
  if (!(timeout_seconds > 0)) throw Error(ErrorCode::config_error, "timeout_seconds must be positive");
  if (enumeration_threshold < 0 || enumeration_threshold > 30)
    throw Error(ErrorCode::config_error, "enumeration_threshold must be in 0..30");
  if (threads < 1) throw Error(ErrorCode::config_error, "threads must be >= 1");
  if (posterior_draws < 2) throw Error(ErrorCode::config_error, "posterior_draws must be >= 2");
  if (mc3_iterations < 1000) throw Error(ErrorCode::config_error, "mc3_iterations must be >= 1000");
  if (tuning_folds < 2) throw Error(ErrorCode::config_error, "tuning_folds must be >= 2");
  if (reference_method.empty()) throw Error(ErrorCode::config_error, "reference_method is empty");
}

std::string SimulationConfig::canonical_json() const {
  nlohmann::ordered_json j;
  j["master_seed"] = master_seed;
  j["replications"] = replications;
  j["eval_folds"] = eval_folds;
  j["timeout_seconds"] = timeout_seconds;
  j["enumeration_threshold"] = enumeration_threshold;
  j["reference_method"] = reference_method;
  j["posterior_draws"] = posterior_draws;
  j["mc3_iterations"] = mc3_iterations;
  j["tuning_folds"] = tuning_folds;
  j["methods"] = methods;
  auto ds = nlohmann::ordered_json::array();
  for (const DatasetSpec& d : datasets) {
    nlohmann::ordered_json e;
    e["name"] = d.name;
    e["file"] = d.path.filename().string();
    e["outcome"] = d.outcome;
    e["categorical"] = d.categorical;
    ds.push_back(e);
  }
  j["datasets"] = ds;
  return j.dump();
}

SimulationConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  SimulationConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  DatasetSpec* current = nullptr;
  std::set<std::string> top_keys;
  std::set<std::string> table_keys;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s == "[[dataset]]") {
      cfg.datasets.emplace_back();
      current = &cfg.datasets.back();
      table_keys.clear();
      continue;
    }
    if (s.front() == '[') fail(line, "unsupported table " + s);
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const Value value = parse_value(s.substr(eq + 1), line);
    if (!(current ? table_keys : top_keys).insert(key).second) fail(line, "duplicate key " + key);
    if (current) {
      if (key == "name") current->name = as_string(value, key, line);
      else if (key == "path") {
        std::filesystem::path p = as_string(value, key, line);
        current->path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      } else if (key == "outcome") current->outcome = as_string(value, key, line);
      else if (key == "categorical") current->categorical = as_list(value, key, line);
      else fail(line, "unknown dataset key " + key);
      continue;
    }
    if (key == "methods") cfg.methods = as_list(value, key, line);
    else if (key == "replications") cfg.replications = static_cast<int>(as_integer(value, key, line));
    else if (key == "eval_folds") cfg.eval_folds = static_cast<int>(as_integer(value, key, line));
    else if (key == "master_seed") {
      const long long v = as_integer(value, key, line);
      if (v < 0) fail(line, "master_seed must be non-negative");
      cfg.master_seed = static_cast<std::uint64_t>(v);
    } else if (key == "timeout_seconds") cfg.timeout_seconds = as_number(value, key, line);
    else if (key == "enumeration_threshold") cfg.enumeration_threshold = static_cast<int>(as_integer(value, key, line));
    else if (key == "reference_method") cfg.reference_method = as_string(value, key, line);
    else if (key == "threads") cfg.threads = static_cast<int>(as_integer(value, key, line));
    else if (key == "posterior_draws") cfg.posterior_draws = static_cast<int>(as_integer(value, key, line));
    else if (key == "mc3_iterations") cfg.mc3_iterations = static_cast<int>(as_integer(value, key, line));
    else if (key == "tuning_folds") cfg.tuning_folds = static_cast<int>(as_integer(value, key, line));
    else fail(line, "unknown key " + key);
  }
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace logitbench
