#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctxlab::cli {

/// Runs one command line. Exit codes: 0 success, 1 invalid input, 2 budget or
/// convergence failure. Documents go to --output (written atomically) or `out`;
/// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctxlab::cli
