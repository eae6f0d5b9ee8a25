#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace xworld::cli {

/// Exit codes: 0 success, 1 domain error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs every built-in scenario and prints the expected-vs-actual table.
/// Returns true when every check matches.
bool run_examples(std::ostream& out);

}  // namespace xworld::cli
