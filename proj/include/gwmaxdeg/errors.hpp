#pragma once

#include <stdexcept>
#include <string>

namespace gwmaxdeg {

// Invalid distribution parameters, malformed inputs, regime mismatches.
struct SpecError : std::invalid_argument {
    explicit SpecError(const std::string& what) : std::invalid_argument(what) {}
};

// Solver non-convergence and other numerical pathologies.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gwmaxdeg
