#include "logitbench/cli.hpp"

int main(int argc, char** argv) { return logitbench::run_cli(argc, argv); }
