// cyslag: verification suites, parameter scans and report aggregation.

#include "cyslag/cli.hpp"

int main(int argc, char** argv) { return cyslag::run_cli(argc, argv); }
