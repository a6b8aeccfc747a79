#pragma once

// Command-line front end shared by the cyslag executable.
//
//   cyslag verify <suite> [--config F] [--seed N] [--out DIR] [--tol-scale X] [--timing]
//   cyslag scan <family>  [--config F] [--seed N] [--out DIR]
//   cyslag report <dir>
//
// Exit codes: 0 all hard checks pass, 1 a check failed or I/O error, 2 usage, 3 config.

namespace cyslag {

int run_cli(int argc, char** argv);

}  // namespace cyslag
