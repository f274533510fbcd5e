#pragma once

// Command-line driver. Kept as a library entry point so tests can invoke
// subcommands in-process; the drstack binary just forwards argv.
//
// Subcommands:
//   run       solve a scenario and write eu_table, provider_table, series,
//             and kkt_report files
//   validate  lint a scenario document
//   oracle    re-solve with the exhaustive grid and diff against the
//             configured mode
//   compare   direction-of-change report between two scenarios
//
// Exit codes: 0 success, 1 usage/runtime error, 2 scenario problem,
// 3 numeric failure, 4 oracle found a better optimum than the solver.

#include <iostream>
#include <string>
#include <vector>

namespace drstack {

int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace drstack
