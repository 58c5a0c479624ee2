#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hbubble::harness {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    // Measured quantities, in a fixed order; these form the numeric section
    // compared by the determinism criterion.
    std::vector<std::pair<std::string, double>> values;
    double seconds = 0.0;  // wall clock, kept out of the numeric section
};

struct AcceptanceOptions {
    // Divides every grid resolution; values > 1 are a negative control that
    // should make the convergence criteria fail.
    int coarsen = 1;
    bool determinism = true;  // criterion 12 reruns 1 to 11
    std::vector<int> only;    // empty: all criteria
};

inline constexpr int kCriterionCount = 12;

CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});

// Reruns the criteria in `first` and compares numeric sections.
CriterionResult determinism_check(const std::vector<CriterionResult>& first, const AcceptanceOptions& opts = {});

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

// Canonical text of ids, verdicts and values (17 digits), without timings.
std::string numeric_section(const std::vector<CriterionResult>& results);

// `[PASS] 1 sphere oracle: detail` lines.
std::string format_line(const CriterionResult& r);

}  // namespace hbubble::harness
