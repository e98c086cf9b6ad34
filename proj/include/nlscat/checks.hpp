#pragma once

// Invariant suite run by `nlscat check`: small, named property checks per
// module at desk scale.

#include <functional>
#include <string>
#include <vector>

#include "nlscat/inverse.hpp"

namespace nlscat::checks {

struct CheckResult {
    std::string module;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;

    std::string id() const { return module + "." + name; }
};

struct Settings {
    double k = 2.0;
    std::vector<int> probe_schedule{8, 16, 32, 64};
};

struct SuiteResult {
    std::vector<CheckResult> results;
    std::vector<ProbePoint> probe;  ///< filled when the range probe ran
    bool all_passed() const;
};

/// Registered check ids in run order.
std::vector<std::string> names();

/// Runs every check whose module or id equals filter (all when filter is
/// empty). on_result is called after each check.
SuiteResult run(const Settings& s, const std::string& filter = {},
                const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace nlscat::checks
