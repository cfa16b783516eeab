#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace alphagan {

struct GradCheckResult {
    std::string name;
    double max_rel_err = 0.0;
    double threshold = 0.0;
    bool passed() const { return max_rel_err < threshold; }
};

/// Checks every primitive op and composite loss against central finite
/// differences at `points_per_case` random points. Non-differentiable spots
/// (relu kink, abs at 0, ...) are excluded by the point generators.
/// `inject_fault` appends a case with a deliberately broken gradient so
/// callers can verify the harness detects failures.
std::vector<GradCheckResult> run_gradcheck_suite(std::uint64_t seed, int points_per_case = 100,
                                                 bool inject_fault = false);

}  // namespace alphagan
