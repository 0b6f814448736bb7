#pragma once

#include <string>
#include <vector>

namespace etg::cli {

/// Exit status: 0 success, 1 input or usage error, 2 internal error.
int run(const std::vector<std::string>& args);

}  // namespace etg::cli
