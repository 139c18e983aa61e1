#pragma once

#include <string>
#include <vector>

namespace crest {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Built-in verification battery: gradient checks against finite
// differences, solver cross-checks, and metric fixtures. `inject_fault`
// names a check whose computed values are perturbed before comparison;
// used to prove the harness actually detects failures.
std::vector<CheckResult> run_selfcheck(const std::string& inject_fault = "");

}  // namespace crest
