#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hbubble/alpha_solver.hpp"
#include "hbubble/curvature_field.hpp"
#include "hbubble/surface_map.hpp"

namespace hbubble {

struct Concentration {
    double epsilon = 0.0;  // 1 / max |grad u|
    std::uint32_t node = 0;
    Vec2 z_star;
};

// Largest plane gradient over nodes; ties go to the smallest node index.
Concentration locate_concentration(const SurfaceMap& u);
inline Concentration locate_concentration(const AlphaSolveState& s) { return locate_concentration(s.u); }

struct RescaledWindow {
    SurfaceMap v;
    double epsilon = 0.0;
    Vec2 z_star;
    double radius = 0.0;
    bool clipped = false;  // part of the window lies outside the disk (half-plane regime)
};

inline constexpr double kWindowRadius = 8.0;
inline constexpr int kWindowNodes = 129;

// v(z) = u(epsilon z + z_star) on a uniform window grid, by piecewise cubic
// interpolation of u.
RescaledWindow rescale(const SurfaceMap& u, double epsilon, const Vec2& z_star, double window_radius = kWindowRadius,
                       int n = kWindowNodes);

// H1 distance sqrt(int |grad(v - w)|^2 + int |v - w|^2) of two maps on one window.
double h1_distance(const SurfaceMap& v, const SurfaceMap& w);

// Green's identity on the window: D + lambda int H(v) v . v_x ^ v_y equals half
// the boundary flux of v . dv/dn for solutions. Returns |defect| / D.
double window_identity_defect(const SurfaceMap& v, const CurvatureField& f, double lambda);

struct BlowUpRecord {
    double alpha = 1.0;
    double epsilon = 0.0;
    Vec2 z_star;
    double lambda = 1.0;  // epsilon^(2 (alpha - 1))
    double level = 0.0;   // E^alpha_H(u^alpha)
    RescaledWindow window;
    double window_dirichlet = 0.0;
    double window_energy = 0.0;  // E_{lambda H}(v) on the window
    double residual = 0.0;       // relative lambda-system residual
    double conformality = 0.0;   // relative conformality defect
    std::string checkpoint;      // reference written by the harness, may be empty
};

double lambda_of(double epsilon, double alpha);

struct LambdaEstimate {
    std::vector<double> raw;
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool degenerate = false;  // estimate near 0
    bool near_one = false;    // estimate within 0.05 of 1
};

// Extrapolation of lambda_alpha to alpha = 1 in the variable alpha - 1, from
// the polynomial through the last three records; the interval spans that
// value, the linear extrapolation through the last two and the last raw value.
LambdaEstimate track_lambda(const std::vector<BlowUpRecord>& records);
LambdaEstimate track_lambda(const std::vector<double>& alphas, const std::vector<double>& lambdas);

struct LimitDiagnostics {
    double residual = 0.0;          // relative
    double conformality = 0.0;      // relative
    double energy_identity = 0.0;   // window_identity_defect
    double center_gradient = 0.0;   // |grad v(0)|
    bool nonconstant = false;
    bool passed = false;
};

LimitDiagnostics limit_diagnostics(const SurfaceMap& v, const CurvatureField& f, double lambda, double tol = 0.05);

struct BlowUpTrace {
    std::vector<BlowUpRecord> records;
    std::optional<LambdaEstimate> lambda;
    std::vector<double> h1_distances;  // between consecutive windows
    bool epsilon_nonincreasing = true;
    bool any_clipped = false;
};

BlowUpRecord blowup_record(const SurfaceMap& u, double alpha, double level, const CurvatureField& f,
                           double window_radius = kWindowRadius, int n = kWindowNodes);

BlowUpTrace build_trace(const std::vector<AlphaSolveState>& states, const CurvatureField& f,
                        double window_radius = kWindowRadius, int n = kWindowNodes);

struct SemicontinuityReport {
    double lambda = 0.0;
    double window_energy = 0.0;  // E_{lambda H}(v_final) on the window
    double min_level = 0.0;      // min over recorded E^alpha levels
    double margin = 0.0;         // (lambda min_level - window_energy) / |lambda min_level|
    bool tail_flagged = true;    // the window omits the tail of v, so the left side is understated
};

SemicontinuityReport semicontinuity_check(const BlowUpTrace& trace, const CurvatureField& f);

// Dilated truncated bubbles u_k(z) = omega(k z) near the origin, with
// alpha_k = 1 + 1 / k^2, standing in for a concentrating solver family.
struct SyntheticFamilyOptions {
    std::vector<double> ks{4.0, 8.0, 16.0};
    double delta = 0.75;
    double h0 = 1.0;
    int rings = 256;
    int n_theta = 128;
};

std::vector<AlphaSolveState> synthetic_family(const CurvatureField& f, const SyntheticFamilyOptions& opts = {});

}  // namespace hbubble
