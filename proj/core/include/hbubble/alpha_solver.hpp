#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hbubble/curvature_field.hpp"
#include "hbubble/surface_map.hpp"

namespace hbubble {

struct IterationRecord {
    int iteration = 0;
    const char* phase = "";  // "ray", "minmax", "descent", "newton"
    double energy = 0.0;
    double grad_norm = 0.0;
    double grad_l2 = 0.0;  // |grad u|_2
    double step = 0.0;
};

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 20000;
    double ray_max_scale = 10.0;  // ray maximization searches s in (0, ray_max_scale]
    bool newton = true;
    double newton_threshold = 1e-3;  // switch to Newton below this gradient norm
    int newton_max = 40;
    // Optional deterministic perturbation of the initial map.
    std::optional<std::uint64_t> seed;
    double perturbation = 0.0;
    std::function<void(const IterationRecord&)> trace;
};

enum class SolveStatus { Converged, NotConverged, Collapsed };
const char* to_string(SolveStatus s);

struct AlphaSolveState {
    double alpha = 1.0;
    SurfaceMap u;
    double energy = 0.0;      // E^alpha_H(u)
    double grad_norm = 0.0;   // L2 norm of the gradient representer
    double residual = 0.0;    // alpha_residual (strong form, reported only)
    double grad_l2 = 0.0;     // |grad u|_2
    double grad_sup = 0.0;    // |grad u|_inf
    double sup_norm = 0.0;    // |u|_inf
    int iterations = 0;
    int newton_steps = 0;
    bool converged = false;
    SolveStatus status = SolveStatus::NotConverged;
    std::string message;
};

// Critical point of E^alpha_H on the disk near the radial mountain pass:
// ray maximization, then H1-preconditioned descent restricted to ray maxima,
// then damped Newton on the full gradient.
AlphaSolveState solve_alpha(const CurvatureField& f, double alpha, const SurfaceMap& init,
                            const SolverOptions& opts = {});

// Warm-started chain over a strictly decreasing schedule in (1, 2). Stops at the
// first failed solve; the failed state is the last entry.
std::vector<AlphaSolveState> continuation(const CurvatureField& f, const std::vector<double>& alphas,
                                          const SurfaceMap& init, const SolverOptions& opts = {});

// alpha_j = 1 + 2^-j, j = 1..n.
std::vector<double> dyadic_schedule(int n);

// Lower bound on int |grad u|^2 for nonzero critical points.
double h1_lower_bound(double M_bar, double S_H);

struct H1BoundsReport {
    double value = 0.0;  // int |grad u|^2
    double lower = 0.0;
    std::optional<double> upper;  // empty when the coefficient is not positive
    double M_bar = 0.0;
    double S_H = 0.0;
    bool lower_ok = false;
    bool upper_ok = false;
    bool upper_indeterminate = false;
    double lower_margin = 0.0;  // (value - lower) / lower
    std::optional<double> upper_margin;  // (upper - value) / upper
    bool passed() const { return lower_ok && (upper_ok || upper_indeterminate); }
};

H1BoundsReport verify_h1_bounds(const AlphaSolveState& state, const CurvatureField& f,
                                std::optional<double> S_override = std::nullopt);

struct LinftyReport {
    double sup_norm = 0.0;
    double H0 = 0.0;
    double R0 = 0.0;
    double C = 0.0;
    double bound = 0.0;
    double ratio = 0.0;  // (|u|_inf - R0) / (|H0| |grad u|_2^2)
    bool holds = false;
};

LinftyReport verify_linfty_bound(const AlphaSolveState& state, const CurvatureField& f,
                                 double C = 0.15915494309189535);

}  // namespace hbubble
