#pragma once

#include <string>
#include <vector>

namespace rfsel::cli {

// Runs the command line tool. Returns 0 on success, 2 on configuration
// errors and 3 on data errors.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace rfsel::cli
