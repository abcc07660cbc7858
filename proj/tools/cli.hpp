#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ncs::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_divergence = 3,
    exit_calibration_range = 4,
};

/// Entry point of the ncs-sim tool; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncs::cli
