#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwmaxdeg/offspring.hpp"

namespace gwmaxdeg::checks {

enum class Status { Pass, Fail, Underpowered };

struct CheckResult {
    std::string name;
    Status status = Status::Pass;
    std::string detail;
};

struct SuiteOptions {
    std::int64_t trials = 20000;
    std::uint64_t seed = 1;
    bool include_montecarlo = true;
};

// The builtin family set used by the invariant suite.
std::vector<OffspringSpec> builtin_families();

// Runs every module's invariants across the builtin families. UNDERPOWERED
// marks Monte Carlo checks whose trial budget cannot decide the claim; it is
// not a failure.
std::vector<CheckResult> run_builtin_suite(const SuiteOptions& opt);

inline bool all_passed(const std::vector<CheckResult>& rs) {
    for (const auto& r : rs)
        if (r.status == Status::Fail) return false;
    return true;
}

}  // namespace gwmaxdeg::checks
