#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hbubble/curvature_field.hpp"
#include "hbubble/surface_map.hpp"

namespace hbubble {

// f(s) = E_H(s u) sampled on [0, s_max], its derivative, and the located maximum.
struct RadialPathProfile {
    std::vector<double> s;
    std::vector<double> f;
    std::vector<double> df;  // first_variation(s u, F, u)

    std::optional<double> s_bar;
    std::optional<double> f_max;
    std::optional<double> V_at_max;  // V_H(s_bar u)
    std::vector<double> local_maxima;  // sample positions of every interior local maximum

    int sign_changes = 0;  // of df over the samples with s > 0
    bool negative_found = false;
    std::optional<double> s0;  // first sampled s with f(s) < 0
    double s_max = 0.0;        // after doublings
    int doublings = 0;
    bool unbounded_above = false;  // f increasing on every sample, no maximum to report
    std::optional<double> cubic_leading;  // least-squares cubic fit of f
};

RadialPathProfile radial_profile(const SurfaceMap& u, const CurvatureField& f, double s_max, int n = 64,
                                 std::optional<double> alpha = std::nullopt);

struct Candidate {
    std::string id;
    SurfaceMap map;
};

struct CandidateResult {
    std::string candidate_id;
    std::optional<double> s_bar;
    std::optional<double> f_max;
    std::optional<double> V_at_max;
    int sign_changes = 0;
    bool excluded = false;
    std::string note;
};

enum class StarCondition { Satisfied, Violated, Indeterminate };
const char* to_string(StarCondition c);

struct MountainPassEstimate {
    std::string field;
    std::optional<double> alpha;
    std::vector<CandidateResult> candidates;
    std::optional<double> c_estimate;
    std::string best_candidate;
    // 4 pi / (3 H_inf^2); +infinity when H_inf = 0, empty when H_inf is unknown.
    std::optional<double> upper_bound_4pi;
    StarCondition star_condition = StarCondition::Indeterminate;
};

struct FamilyOptions {
    std::vector<double> truncation_deltas{0.3, 0.2, 0.1};
    std::vector<double> cone_deltas{0.3, 0.5};
    std::vector<double> translation_radii{2.0, 5.0, 10.0};
    double translation_delta = 0.2;
    int n_theta = 64;
    int cone_rings = 64;
};

// Bubble truncations, cone maps and truncated translated spheres built from
// the sphere bubble of curvature H_inf (or H(0) when H_inf is 0 or unknown).
std::vector<Candidate> default_family(const CurvatureField& f, const FamilyOptions& opts = {});

// Parses a comma-separated family description such as
// "truncation:0.3,truncation:0.1,cone:0.5,translated:5".
std::vector<Candidate> parse_family(const std::string& text, const CurvatureField& f, const FamilyOptions& opts = {});

MountainPassEstimate estimate_cH(const CurvatureField& f, const std::vector<Candidate>& family,
                                 std::optional<double> alpha = std::nullopt);

// Isoperimetric constant S = (36 pi)^(1/3) and its curvature-scaled version
// S_H with (S_H / 3)^3 = 4 pi / (3 H0^2) for constant H0.
double isoperimetric_constant();
std::optional<double> constant_field_S(const CurvatureField& f);

struct BoundsReport {
    std::optional<double> c_estimate;
    std::optional<double> upper_bound_4pi;
    std::optional<double> exact_lower;  // (S_H / 3)^3 for constant fields
    std::optional<double> relative_gap;  // (estimate - bound) / bound
    StarCondition star_condition = StarCondition::Indeterminate;
    std::string reason;
};

BoundsReport bounds_report(const CurvatureField& f, const MountainPassEstimate& est, double tol = 1e-3);

struct LambdaCheck {
    std::vector<double> lambdas;  // ascending
    std::vector<std::optional<double>> estimates;
    bool monotone = true;
    double worst_violation = 0.0;  // relative, positive when c(lambda_i+1) > c(lambda_i)
    bool gate = true;              // sampled M_bar < 1
};

LambdaCheck lambda_monotonicity_check(const CurvatureField& f, const std::vector<Candidate>& family,
                                      std::vector<double> lambdas, double tol = 5e-3);

struct TruncationCheck {
    std::optional<double> base;
    std::vector<double> radii;
    std::vector<std::optional<double>> estimates;
    std::vector<double> differences;  // estimate - base
    std::vector<bool> exceeds;        // difference > tol * base
    bool limsup_ok = true;            // largest radius does not exceed
};

TruncationCheck truncation_semicontinuity_check(const CurvatureField& f, const std::vector<Candidate>& family,
                                                const std::vector<double>& radii, double tol = 1e-3);

struct LocalMinimumCheck {
    double rho = 0.0;  // (S_H / 2)^(3/2)
    std::vector<double> scales;
    std::vector<double> margins;  // (E^alpha(s u) - D(s u) / 2) / max(D(u), 1)
    bool passed = true;
};

// Checks E^alpha(s u) >= D(s u) / 2 on scaled copies with |grad(s u)|_2 <= rho.
// The relative tolerance absorbs discretization of the isoperimetric equality case.
LocalMinimumCheck local_minimum_check(const SurfaceMap& u, const CurvatureField& f, double alpha,
                                      std::optional<double> S_override = std::nullopt, int n_scales = 16,
                                      double tol = 1e-3);

}  // namespace hbubble
