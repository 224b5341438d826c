#pragma once

namespace logitbench {

// Exit codes: 0 success, 1 unexpected failure, 2 configuration or usage
// error, 3 ingest error, 4 empty results.
int run_cli(int argc, char** argv);

}  // namespace logitbench
