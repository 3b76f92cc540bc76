#pragma once

#include <string>
#include <vector>

namespace exlgm {

/// Runs the command-line interface. Returns 0 on success, 1 on validation
/// errors (bad flags, files, configuration), 2 on numerical failures.
int run_cli(const std::vector<std::string>& args);

}  // namespace exlgm
