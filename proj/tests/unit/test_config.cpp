#include <catch_amalgamated.hpp>

#include "logitbench/config.hpp"
#include "logitbench/error.hpp"

using namespace logitbench;

namespace {

const char* kConfig = R"(# comment line
master_seed = 18446744073709551  # trailing comment
replications = 7
eval_folds = 4
timeout_seconds = 12.5
reference_method = "lasso"
methods = ["p05", "lasso", "bma_bic"]
threads = 3

[[dataset]]
name = "burn"
path = "data/burn.csv"
outcome = "death"
categorical = ["race", "gender"]

[[dataset]]
name = "abs"
path = "/tmp/abs.csv"
outcome = "y"
)";

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("config parsing") {
  const SimulationConfig c = parse_config(kConfig, "/base");
  CHECK(c.master_seed == 18446744073709551ULL);
  CHECK(c.replications == 7);
  CHECK(c.eval_folds == 4);
  CHECK(c.timeout_seconds == 12.5);
  CHECK(c.reference_method == "lasso");
  CHECK(c.methods == std::vector<std::string>{"p05", "lasso", "bma_bic"});
  CHECK(c.threads == 3);
  REQUIRE(c.datasets.size() == 2);
  CHECK(c.datasets[0].path == std::filesystem::path("/base/data/burn.csv"));
  CHECK(c.datasets[0].categorical == std::vector<std::string>{"race", "gender"});
  CHECK(c.datasets[1].path == std::filesystem::path("/tmp/abs.csv"));
  CHECK(c.enumeration_threshold == 20);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors") {
  CHECK(code_of([] { parse_config("replications = \"many\"\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { parse_config("bogus = 1\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { parse_config("replications = 1\nreplications = 2\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { parse_config("[server]\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { parse_config("methods = [\"a\"\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { parse_config("just words\n"); }) == ErrorCode::config_error);
  CHECK(code_of([] { load_config("/nonexistent/config.toml"); }) == ErrorCode::config_error);

  SimulationConfig c = parse_config(kConfig);
  auto broken = c;
  broken.replications = 0;
  CHECK(code_of([&] { broken.validate(); }) == ErrorCode::config_error);
  broken = c;
  broken.eval_folds = 1;
  CHECK(code_of([&] { broken.validate(); }) == ErrorCode::config_error);
  broken = c;
  broken.methods.clear();
  CHECK(code_of([&] { broken.validate(); }) == ErrorCode::config_error);
  broken = c;
  broken.datasets.clear();
  CHECK(code_of([&] { broken.validate(); }) == ErrorCode::config_error);
  broken = c;
  broken.methods.push_back("lasso");
  CHECK(code_of([&] { broken.validate(); }) == ErrorCode::config_error);
}

TEST_CASE("canonical rendering ignores thread count and directory") {
  SimulationConfig a = parse_config(kConfig, "/one");
  SimulationConfig b = parse_config(kConfig, "/two");
  b.threads = 1;
  CHECK(a.canonical_json() == b.canonical_json());
  b.master_seed += 1;
  CHECK(a.canonical_json() != b.canonical_json());
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
