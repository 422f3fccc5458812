#pragma once

#include <string>
#include <vector>

namespace hs2s::cli {

// Dispatches one CLI invocation. Returns the process exit status:
// 0 success, 2 usage errors, 1 data/model errors. Errors print a single
// machine-parsable `error: <category>: <message>` line on stderr.
int run_command(const std::vector<std::string>& argv);

}  // namespace hs2s::cli
