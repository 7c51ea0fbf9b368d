#pragma once

#include <string>
#include <vector>

namespace speechdep::cli {

// Entry point behind the speechdep binary. Exit codes: 0 success, 1
// validation or usage error, 2 I/O error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace speechdep::cli
