#include "hbubble/harness/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hbubble/alpha_solver.hpp"
#include "hbubble/blowup.hpp"
#include "hbubble/curvature_field.hpp"
#include "hbubble/functionals.hpp"
#include "hbubble/mountain_pass.hpp"
#include "hbubble/util.hpp"

namespace hbubble::harness {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourThirdsPi = 4.0 * kPi / 3.0;

double rel(double value, double exact) { return std::abs(value - exact) / std::abs(exact); }

// Smooth map vanishing on the unit circle: (1 - |z|^2) times a random
// quadratic polynomial per component.
SurfaceMap random_disk_map(const GridPtr& grid, std::mt19937_64& rng, double amplitude) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double c[3][6];
    for (auto& row : c)
        for (double& v : row) v = amplitude * U(rng);
    SurfaceMap u;
    u.grid = grid;
    u.values.resize(grid->node_count());
    for (std::size_t k = 0; k < grid->node_count(); ++k) {
        const Vec2 z = grid->node(k).plane;
        const double bump = 1.0 - (z.x * z.x + z.y * z.y);
        const double p[6] = {1.0, z.x, z.y, z.x * z.x, z.x * z.y, z.y * z.y};
        double out[3] = {0.0, 0.0, 0.0};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 6; ++b) out[a] += c[a][b] * p[b];
        u.values[k] = bump * Vec3{out[0], out[1], out[2]};
        if (grid->node(k).fixed) u.values[k] = Vec3{};
    }
    return u;
}

// omega + eps P(omega) with P a random quadratic map of R^3; smooth on the
// whole sphere chart including the far field.
SurfaceMap perturbed_sphere(const SurfaceMap& omega, std::mt19937_64& rng, double eps) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double c[3][10];
    for (auto& row : c)
        for (double& v : row) v = U(rng);
    auto P = [&](const Vec3& x) {
        const double m[10] = {1.0, x.x, x.y, x.z, x.x * x.x, x.y * x.y, x.z * x.z, x.x * x.y, x.y * x.z, x.z * x.x};
        double out[3] = {0.0, 0.0, 0.0};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 10; ++b) out[a] += c[a][b] * m[b];
        return Vec3{out[0], out[1], out[2]};
    };
    SurfaceMap u = omega;
    u.source.reset();
    for (Vec3& v : u.values) v += eps * P(v);
    if (u.far_field) *u.far_field += eps * P(*u.far_field);
    return u;
}

struct Builder {
    CriterionResult r;
    std::ostringstream detail;

    void value(const std::string& name, double v) { r.values.emplace_back(name, v); }
    void note(const std::string& text) {
        if (detail.tellp() > 0) detail << "; ";
        detail << text;
    }
};

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g%%", 100.0 * v);
    return buf;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

int scaled_res(int n, int coarsen, int minimum) {
    int m = std::max(minimum, n / std::max(1, coarsen));
    return m + (m % 2);
}

void sphere_oracle(Builder& b, const AcceptanceOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const int lat = scaled_res(128, o.coarsen, 8);
    const auto H = CurvatureField::constant(1.0);
    const SurfaceMap w = make_sphere_bubble(1.0, lat, 2 * lat);
    const double D = dirichlet(w);
    const double V = volume(w, H);
    const double E = D + 2.0 * V;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double eD = rel(D, 4.0 * kPi);
    const double eV = rel(V, -kFourThirdsPi);
    const double eE = rel(E, kFourThirdsPi);
    b.value("D", D);
    b.value("V_H", V);
    b.value("E_H", E);
    b.r.passed = eD <= 5e-3 && eV <= 5e-3 && eE <= 1e-2 && secs < 5.0;
    b.note("D err " + pct(eD) + ", V err " + pct(eV) + ", E err " + pct(eE) + ", " + sci(secs) + " s");
}

void radial_mountain_pass(Builder& b, const AcceptanceOptions& o) {
    const int lat = scaled_res(64, o.coarsen, 8);
    const auto H = CurvatureField::constant(1.0);
    const SurfaceMap w = make_sphere_bubble(1.0, lat, 2 * lat);
    const RadialPathProfile p = radial_profile(w, H, 3.0, 64);
    const double s_bar = p.s_bar.value_or(std::nan(""));
    const double f = p.f_max.value_or(std::nan(""));
    b.value("s_bar", s_bar);
    b.value("f_max", f);
    b.value("sign_changes", p.sign_changes);
    b.r.passed = std::abs(s_bar - 1.0) <= 1e-3 && rel(f, kFourThirdsPi) <= 1e-2 && p.sign_changes == 1 &&
                 p.s_max <= 3.0;
    b.note("s_bar " + format_short(s_bar) + ", f err " + pct(rel(f, kFourThirdsPi)) + ", " +
           std::to_string(p.sign_changes) + " sign change(s) on [0, " + format_short(p.s_max) + "]");
}

void family_estimate(Builder& b, const AcceptanceOptions& o) {
    const auto H = CurvatureField::constant(1.0);
    FamilyOptions fo;
    fo.n_theta = scaled_res(fo.n_theta, o.coarsen, 8);
    fo.cone_rings = scaled_res(fo.cone_rings, o.coarsen, 8);
    const auto family = default_family(H, fo);
    const MountainPassEstimate est = estimate_cH(H, family);
    const double c = est.c_estimate.value_or(std::nan(""));
    const LambdaCheck lc = lambda_monotonicity_check(H, family, {0.25, 0.5, 0.75, 1.0}, 5e-3);
    b.value("c_estimate", c);
    for (std::size_t i = 0; i < lc.lambdas.size(); ++i)
        b.value("c_lambda_" + format_short(lc.lambdas[i]), lc.estimates[i].value_or(std::nan("")));
    b.value("worst_violation", lc.worst_violation);
    const bool in_range = c >= kFourThirdsPi && c <= kFourThirdsPi * 1.05;
    b.r.passed = in_range && lc.monotone;
    b.note("c = " + format_short(c) + " (" + est.best_candidate + "), ratio to 4pi/3 " +
           format_short(c / kFourThirdsPi) + ", lambda sweep " + (lc.monotone ? "monotone" : "not monotone") +
           " (worst " + pct(lc.worst_violation) + ")");
}

void variation_consistency(Builder& b, const AcceptanceOptions& o) {
    const int n = scaled_res(16, o.coarsen, 8);
    const auto grid = Grid::disk(n, n);
    const std::vector<std::pair<std::string, CurvatureField>> fields = {
        {"constant", CurvatureField::constant(1.0)},
        {"radial", CurvatureField::parse("1 + 0.5 * exp(-r^2)")},
        {"expression", CurvatureField::parse("1 + 0.3 * sin(u1) * cos(u2) + 0.2 * u3")},
    };
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    double worst_alpha = 0.0;
    const double alpha = 1.1;
    for (const auto& [name, f] : fields) {
        for (int t = 0; t < 20; ++t) {
            const SurfaceMap u = random_disk_map(grid, rng, 0.8);
            const SurfaceMap h = random_disk_map(grid, rng, 1.0);
            const double step = 1e-5;
            const double fd = (energy_value(axpy(u, step, h), f) - energy_value(axpy(u, -step, h), f)) / (2 * step);
            const double an = first_variation(u, f, h);
            worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
            const double fda =
                (energy_value(axpy(u, step, h), f, alpha) - energy_value(axpy(u, -step, h), f, alpha)) / (2 * step);
            const double ana = alpha_first_variation(u, f, h, alpha);
            worst_alpha = std::max(worst_alpha, std::abs(fda - ana) / std::max(std::abs(ana), 1e-12));
        }
    }
    b.value("worst_relative_error", worst);
    b.value("worst_relative_error_alpha", worst_alpha);
    b.r.passed = worst <= 1e-6 && worst_alpha <= 1e-6;
    b.note("60 pairs, worst " + sci(worst) + " (alpha = 1), " + sci(worst_alpha) + " (alpha = 1.1)");
}

void isoperimetric(Builder& b, const AcceptanceOptions& o) {
    const int lat = scaled_res(64, o.coarsen, 8);
    const auto H = CurvatureField::constant(1.0);
    const double S = isoperimetric_constant();
    const SurfaceMap w = make_sphere_bubble(1.0, lat, 2 * lat);
    const double ratio = isoperimetric_ratio(w, H).value_or(std::nan(""));
    std::mt19937_64 rng(77);
    double worst = std::numeric_limits<double>::infinity();
    int below = 0;
    for (int t = 0; t < 50; ++t) {
        const SurfaceMap u = perturbed_sphere(w, rng, 0.15);
        const auto r = isoperimetric_ratio(u, H);
        if (!r) continue;
        worst = std::min(worst, *r);
        if (*r < S * (1.0 - 0.02)) ++below;
    }
    b.value("ratio", ratio);
    b.value("min_perturbed_ratio", worst);
    b.r.passed = rel(ratio, S) <= 1e-2 && below == 0;
    b.note("ratio err " + pct(rel(ratio, S)) + ", min over 50 perturbations " + format_short(worst / S) + " S");
}

void residual_convergence(Builder& b, const AcceptanceOptions& o) {
    const auto H = CurvatureField::constant(1.0);
    std::vector<double> res;
    double defect = 0.0;
    double D = 0.0;
    for (int lat : {16, 32, 64, 128}) {
        const int n = scaled_res(lat, o.coarsen, 8);
        const SurfaceMap w = make_sphere_bubble(1.0, n, 2 * n);
        res.push_back(hsystem_residual(w, H, 1.0).relative);
        defect = energy_identity_defect(w, H, 1.0);
        D = dirichlet(w);
    }
    double min_order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < res.size(); ++i) {
        const double order = std::log2(res[i - 1] / res[i]);
        b.value("order_" + std::to_string(i), order);
        min_order = std::min(min_order, order);
    }
    for (std::size_t i = 0; i < res.size(); ++i) b.value("residual_" + std::to_string(i), res[i]);
    b.value("identity_defect_relative", defect / D);
    b.r.passed = min_order >= 1.8 && defect / D <= 1e-2;
    b.note("residuals " + sci(res[0]) + " .. " + sci(res.back()) + ", min order " + format_short(min_order) +
           ", identity defect " + pct(defect / D) + " of D");
}

void regularization_ordering(Builder& b, const AcceptanceOptions& o) {
    const int n = scaled_res(16, o.coarsen, 8);
    const auto grid = Grid::disk(n, n);
    const auto H = CurvatureField::constant(1.0);
    std::mt19937_64 rng(4242);
    int violations = 0;
    int non_monotone = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 30; ++t) {
        const SurfaceMap u = random_disk_map(grid, rng, 1.5);
        const double E = energy_value(u, H);
        double previous = std::numeric_limits<double>::infinity();
        for (double alpha : {1.2, 1.05, 1.01}) {
            const double Ea = energy_value(u, H, alpha);
            const double gap = Ea - E;
            min_gap = std::min(min_gap, gap);
            if (gap < 0.0) ++violations;
            if (!(std::abs(gap) < previous)) ++non_monotone;
            previous = std::abs(gap);
        }
    }
    b.value("violations", violations);
    b.value("non_monotone", non_monotone);
    b.value("min_gap", min_gap);
    b.r.passed = violations == 0 && non_monotone == 0;
    b.note("30 maps x 3 exponents, " + std::to_string(violations) + " ordering violations, " +
           std::to_string(non_monotone) + " non-monotone steps, min gap " + sci(min_gap));
}

void solver_soundness(Builder& b, const AcceptanceOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = scaled_res(64, o.coarsen, 8);
    const auto H = CurvatureField::constant(1.0);
    const SurfaceMap init = make_cone_map(0.5, n, n);
    SolverOptions so;
    const AlphaSolveState s = solve_alpha(H, 1.05, init, so);
    const H1BoundsReport h1 = verify_h1_bounds(s, H);
    const AlphaSolveState c = solve_alpha(H, 1.05, scaled(init, 0.01), so);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    b.value("energy", s.energy);
    b.value("grad_norm", s.grad_norm);
    b.value("h1_value", h1.value);
    b.value("h1_lower_margin", h1.lower_margin);
    b.value("h1_upper_margin", h1.upper_margin.value_or(std::nan("")));
    const bool strict = h1.lower_margin > 0.0 && h1.upper_margin && *h1.upper_margin > 0.0;
    const bool collapsed = c.status == SolveStatus::Collapsed;
    b.r.passed = s.converged && s.grad_norm <= 1e-8 && h1.passed() && strict && collapsed && secs < 120.0;
    b.note(std::string(to_string(s.status)) + " in " + std::to_string(s.iterations) + " iterations, |g| " +
           sci(s.grad_norm) + ", H1 margins " + format_short(h1.lower_margin) + " / " +
           format_short(h1.upper_margin.value_or(std::nan(""))) + ", small init " + to_string(c.status) + ", " +
           sci(secs) + " s");
}

void field_truncation(Builder& b, const AcceptanceOptions&) {
    const auto H = CurvatureField::parse("1 + exp(-r)", {}, 1.0);
    const FieldScalars base = estimate_scalars(H, 16.0, 4000);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    bool ok = true;
    for (double rn : {5.0, 10.0}) {
        const auto Hn = truncate_field(H, rn);
        double sup_diff = 0.0;
        double far_dev = 0.0;
        for (int t = 0; t < 4000; ++t) {
            Vec3 d{U(rng), U(rng), U(rng)};
            const double len = std::sqrt(norm2(d));
            if (len < 1e-3) continue;
            d = d / len;
            const double r = (rn + 4.0) * (t + 0.5) / 4000.0;
            const Vec3 u = r * d;
            const double hn = Hn.value(u);
            sup_diff = std::max(sup_diff, std::abs(hn - H.value(u)));
            if (r > rn + 1.0) far_dev = std::max(far_dev, std::abs(hn - 1.0));
        }
        const FieldScalars sn = estimate_scalars(Hn, 16.0, 4000);
        const std::string tag = format_short(rn);
        b.value("sup_diff_" + tag, sup_diff);
        b.value("far_deviation_" + tag, far_dev);
        b.value("M_H_" + tag, sn.M_H);
        const bool here = sup_diff <= 4.0 * std::exp(-rn) && far_dev == 0.0 && sn.M_H <= base.M_H + 1e-9;
        ok = ok && here;
        b.note("r = " + tag + ": sup diff " + sci(sup_diff) + " vs " + sci(4.0 * std::exp(-rn)) + ", M_H " +
               sci(sn.M_H) + " vs " + sci(base.M_H));
    }
    b.value("M_H", base.M_H);
    b.r.passed = ok;
}

void blowup_pipeline(Builder& b, const AcceptanceOptions& o) {
    const auto H = CurvatureField::constant(1.0);
    SyntheticFamilyOptions so;
    so.rings = scaled_res(so.rings, o.coarsen, 8);
    so.n_theta = scaled_res(so.n_theta, o.coarsen, 8);
    const auto family = synthetic_family(H, so);
    const BlowUpTrace trace = build_trace(family, H);
    double worst_eps = 0.0;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const double exact = 1.0 / (2.0 * std::sqrt(2.0) * so.ks[i]);
        const double e = rel(trace.records[i].epsilon, exact);
        worst_eps = std::max(worst_eps, e);
        b.value("epsilon_" + format_short(so.ks[i]), trace.records[i].epsilon);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < trace.h1_distances.size(); ++i)
        decreasing = decreasing && trace.h1_distances[i] < trace.h1_distances[i - 1];
    for (std::size_t i = 0; i < trace.h1_distances.size(); ++i)
        b.value("h1_distance_" + std::to_string(i), trace.h1_distances[i]);
    const LambdaEstimate lam = *trace.lambda;
    const LimitDiagnostics ld = limit_diagnostics(trace.records.back().window.v, H, lam.estimate, 0.05);
    const SemicontinuityReport sc = semicontinuity_check(trace, H);
    b.value("lambda", lam.estimate);
    b.value("limit_residual", ld.residual);
    b.value("limit_conformality", ld.conformality);
    b.value("limit_identity", ld.energy_identity);
    b.value("semicontinuity_margin", sc.margin);
    b.r.passed = worst_eps <= 0.05 && decreasing && std::abs(lam.estimate - 1.0) <= 0.05 && ld.passed &&
                 sc.margin >= -0.01;
    b.note("eps err " + pct(worst_eps) + ", H1 distances " + (decreasing ? "decreasing" : "not decreasing") +
           ", lambda " + format_short(lam.estimate) + ", limit residual " + pct(ld.residual) + ", margin " +
           format_short(sc.margin));
}

void radial_bubble(Builder& b, const AcceptanceOptions&) {
    const auto H = CurvatureField::constant(2.0);
    const RadialBubbleReport rep = radial_bubble_radii(H, 0.01, 5.0);
    const bool one = rep.roots.size() == 1;
    const double rho = one ? rep.roots[0].rho : std::nan("");
    const double E = one ? rep.roots[0].energy : std::nan("");
    b.value("rho", rho);
    b.value("energy", E);
    b.r.passed = one && std::abs(rho - 0.5) <= 1e-10 && rel(E, kPi / 3.0) <= 1e-12;
    b.note(std::to_string(rep.roots.size()) + " root(s), rho - 0.5 = " + sci(rho - 0.5) + ", energy " +
           format17(E));
}

struct Entry {
    const char* title;
    void (*run)(Builder&, const AcceptanceOptions&);
};

constexpr Entry kEntries[] = {
    {"sphere oracle", sphere_oracle},
    {"radial mountain pass", radial_mountain_pass},
    {"family estimate and lambda sweep", family_estimate},
    {"variation consistency", variation_consistency},
    {"isoperimetric ratio", isoperimetric},
    {"residual convergence", residual_convergence},
    {"regularization ordering", regularization_ordering},
    {"alpha-solver soundness", solver_soundness},
    {"field truncation", field_truncation},
    {"blow-up pipeline", blowup_pipeline},
    {"radial bubble", radial_bubble},
};

bool selected(int id, const AcceptanceOptions& o) {
    return o.only.empty() || std::find(o.only.begin(), o.only.end(), id) != o.only.end();
}

}  // namespace

CriterionResult determinism_check(const std::vector<CriterionResult>& first, const AcceptanceOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    AcceptanceOptions inner = opts;
    inner.determinism = false;
    inner.only.clear();
    for (const auto& r : first)
        if (r.id != kCriterionCount) inner.only.push_back(r.id);
    const std::string a = numeric_section(first);
    const std::string b = numeric_section(run_acceptance(inner));
    CriterionResult r;
    r.id = kCriterionCount;
    r.title = "determinism";
    r.passed = !inner.only.empty() && a == b;
    r.detail = std::string(a == b ? "identical" : "different") + " numeric sections over two runs of " +
               std::to_string(inner.only.size()) + " criteria (" + std::to_string(a.size()) + " bytes, hash " +
               hex64(fnv1a64(a)) + ")";
    r.values.emplace_back("numeric_section_bytes", static_cast<double>(a.size()));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
    if (id == kCriterionCount) {
        AcceptanceOptions inner = opts;
        inner.determinism = false;
        inner.only.clear();
        for (int i = 1; i < kCriterionCount; ++i)
            if (opts.only.empty() || selected(i, opts)) inner.only.push_back(i);
        if (inner.only.empty())
            for (int i = 1; i < kCriterionCount; ++i) inner.only.push_back(i);
        return determinism_check(run_acceptance(inner), opts);
    }
    if (id < 1 || id > kCriterionCount) throw std::out_of_range("no acceptance criterion " + std::to_string(id));
    Builder b;
    b.r.id = id;
    b.r.title = kEntries[id - 1].title;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        kEntries[id - 1].run(b, opts);
    } catch (const std::exception& e) {
        b.r.passed = false;
        b.note(std::string("error: ") + e.what());
    }
    b.r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    b.r.detail = b.detail.str();
    return b.r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
    std::vector<CriterionResult> out;
    for (int id = 1; id < kCriterionCount; ++id)
        if (selected(id, opts)) out.push_back(run_criterion(id, opts));
    if (opts.determinism && selected(kCriterionCount, opts)) {
        if (out.empty())
            out.push_back(run_criterion(kCriterionCount, opts));
        else
            out.push_back(determinism_check(out, opts));
    }
    return out;
}

std::string numeric_section(const std::vector<CriterionResult>& results) {
    std::string s;
    for (const auto& r : results) {
        s += std::to_string(r.id) + (r.passed ? " pass\n" : " fail\n");
        for (const auto& [k, v] : r.values) s += "  " + k + " = " + format17(v) + "\n";
    }
    return s;
}

std::string format_line(const CriterionResult& r) {
    return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.title + ": " + r.detail;
}

}  // namespace hbubble::harness
