// Acceptance run: one line per criterion, exit status 1 when any fails.

#include <cstdio>
#include <vector>

#include "hbubble/harness/acceptance.hpp"

using namespace hbubble::harness;

int main() {
    AcceptanceOptions opts;
    std::vector<CriterionResult> results;
    bool all = true;
    for (int id = 1; id < kCriterionCount; ++id) {
        results.push_back(run_criterion(id, opts));
        const auto& r = results.back();
        all = all && r.passed;
        std::printf("%s  (%.1f s)\n", format_line(r).c_str(), r.seconds);
        std::fflush(stdout);
    }
    const CriterionResult det = determinism_check(results, opts);
    all = all && det.passed;
    std::printf("%s  (%.1f s)\n", format_line(det).c_str(), det.seconds);
    std::printf("%s\n", all ? "all acceptance criteria passed" : "acceptance FAILED");
    return all ? 0 : 1;
}
