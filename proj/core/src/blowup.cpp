#include "hbubble/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hbubble/functionals.hpp"

namespace hbubble {

Concentration locate_concentration(const SurfaceMap& u) {
    const GradientSup gs = gradient_sup(u);
    // stencil weights do not sum to zero exactly, so a constant map shows rounding-level gradients
    if (!(gs.value > 1e-10 * std::max(1.0, sup_norm(u)))) throw GeometryError("constant map: no concentration point");
    Concentration c;
    c.epsilon = 1.0 / gs.value;
    c.node = gs.node;
    c.z_star = u.grid->node(gs.node).plane;
    return c;
}

RescaledWindow rescale(const SurfaceMap& u, double epsilon, const Vec2& z_star, double window_radius, int n) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("rescaling needs a positive epsilon");
    RescaledWindow w;
    w.epsilon = epsilon;
    w.z_star = z_star;
    w.radius = window_radius;

    const Grid& src = *u.grid;
    const double reach = epsilon * window_radius;
    const double centre = std::hypot(z_star.x, z_star.y);
    if (src.kind() == ChartKind::Disk) {
        const double R = src.layout().end();
        if (centre - reach * std::sqrt(2.0) >= R) throw GeometryError("rescaled window lies outside the disk");
        w.clipped = centre + reach > R;
    } else if (src.kind() == ChartKind::Window) {
        const double hw = src.half_width();
        w.clipped = std::abs(z_star.x) + reach > hw || std::abs(z_star.y) + reach > hw;
    }

    const GridPtr grid = Grid::window(window_radius, n);
    w.v.grid = grid;
    w.v.values.resize(grid->node_count());
    for (std::size_t k = 0; k < grid->node_count(); ++k) {
        const Vec2 p = grid->node(k).plane;
        w.v.values[k] = interpolate(u, Vec2{epsilon * p.x + z_star.x, epsilon * p.y + z_star.y});
    }
    return w;
}

double h1_distance(const SurfaceMap& v, const SurfaceMap& w) {
    const Grid& a = *v.grid;
    const Grid& b = *w.grid;
    if (&a != &b && (a.kind() != b.kind() || a.node_count() != b.node_count() ||
                     (a.kind() == ChartKind::Window && a.half_width() != b.half_width())))
        throw GeometryError("maps live on different windows");
    SurfaceMap d = v;
    for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] -= w.values[k];
    d.far_field.reset();
    d.source.reset();
    const double l2 = l2_norm(d);
    return std::sqrt(2.0 * dirichlet(d) + l2 * l2);
}

double window_identity_defect(const SurfaceMap& v, const CurvatureField& f, double lambda) {
    const Grid& g = *v.grid;
    if (g.kind() != ChartKind::Window) throw GeometryError("the windowed identity needs a window chart");
    const int n = g.n_radial();
    const double h = 2.0 * g.half_width() / (n - 1);
    const GradientField grad = differentiate(v);
    const double D = dirichlet(v);
    if (!(D > 0.0)) return std::numeric_limits<double>::infinity();

    double vol = 0.0;
    for (const Sample& s : g.samples()) {
        const Vec3& x = v.values[s.node];
        vol += s.weight * f.value(x) * dot(x, cross(grad.ux[s.node], grad.uy[s.node]));
    }
    // Boundary flux of v . dv/dn with Simpson weights along each edge.
    auto simpson = [n](int t) { return (t == 0 || t == n - 1) ? 1.0 / 3.0 : (t % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0); };
    auto at = [n](int i, int j) { return static_cast<std::size_t>(i * n + j); };
    double flux = 0.0;
    for (int t = 0; t < n; ++t) {
        const double w = simpson(t) * h;
        flux += w * dot(v.values[at(n - 1, t)], grad.ux[at(n - 1, t)]);
        flux -= w * dot(v.values[at(0, t)], grad.ux[at(0, t)]);
        flux += w * dot(v.values[at(t, n - 1)], grad.uy[at(t, n - 1)]);
        flux -= w * dot(v.values[at(t, 0)], grad.uy[at(t, 0)]);
    }
    return std::abs(D + lambda * vol - 0.5 * flux) / D;
}

double lambda_of(double epsilon, double alpha) { return std::pow(epsilon, 2.0 * (alpha - 1.0)); }

LambdaEstimate track_lambda(const std::vector<double>& alphas, const std::vector<double>& lambdas) {
    if (alphas.size() != lambdas.size()) throw std::invalid_argument("alpha and lambda lists differ in length");
    if (alphas.size() < 3) throw std::invalid_argument("lambda tracking needs at least three records");
    LambdaEstimate e;
    e.raw = lambdas;
    const std::size_t m = alphas.size();
    const double x[3] = {alphas[m - 3] - 1.0, alphas[m - 2] - 1.0, alphas[m - 1] - 1.0};
    const double y[3] = {lambdas[m - 3], lambdas[m - 2], lambdas[m - 1]};
    // Lagrange polynomial through the last three points, evaluated at 0.
    double quad = 0.0;
    for (int i = 0; i < 3; ++i) {
        double w = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= (0.0 - x[j]) / (x[i] - x[j]);
        quad += w * y[i];
    }
    const double lin = y[2] - x[2] * (y[1] - y[2]) / (x[1] - x[2]);
    e.estimate = quad;
    e.lo = std::min({quad, lin, y[2]});
    e.hi = std::max({quad, lin, y[2]});
    e.degenerate = e.estimate < 0.05;
    e.near_one = std::abs(e.estimate - 1.0) <= 0.05;
    return e;
}

LambdaEstimate track_lambda(const std::vector<BlowUpRecord>& records) {
    std::vector<double> a;
    std::vector<double> l;
    for (const auto& r : records) {
        a.push_back(r.alpha);
        l.push_back(r.lambda);
    }
    return track_lambda(a, l);
}

LimitDiagnostics limit_diagnostics(const SurfaceMap& v, const CurvatureField& f, double lambda, double tol) {
    LimitDiagnostics d;
    d.residual = hsystem_residual(v, f, lambda).relative;
    d.conformality = conformality(v).relative;
    d.energy_identity = v.grid->kind() == ChartKind::Window ? window_identity_defect(v, f, lambda)
                                                             : energy_identity_defect(v, f, lambda) / dirichlet(v);
    const Grid& g = *v.grid;
    std::uint32_t centre = 0;
    if (g.kind() == ChartKind::Window) {
        const int n = g.n_radial();
        centre = static_cast<std::uint32_t>((n / 2) * n + n / 2);
    }
    const GradientField grad = differentiate(v);
    d.center_gradient = std::sqrt(norm2(grad.ux[centre]) + norm2(grad.uy[centre]));
    d.nonconstant = d.center_gradient > 0.5;
    d.passed = d.nonconstant && d.residual <= tol && d.conformality <= tol && d.energy_identity <= tol;
    return d;
}

BlowUpRecord blowup_record(const SurfaceMap& u, double alpha, double level, const CurvatureField& f,
                           double window_radius, int n) {
    BlowUpRecord r;
    r.alpha = alpha;
    const Concentration c = locate_concentration(u);
    r.epsilon = c.epsilon;
    r.z_star = c.z_star;
    r.lambda = lambda_of(c.epsilon, alpha);
    r.level = level;
    r.window = rescale(u, c.epsilon, c.z_star, window_radius, n);
    r.window_dirichlet = dirichlet(r.window.v);
    r.window_energy = energy_value(r.window.v, f.scaled(r.lambda));
    r.residual = hsystem_residual(r.window.v, f, r.lambda).relative;
    r.conformality = conformality(r.window.v).relative;
    return r;
}

BlowUpTrace build_trace(const std::vector<AlphaSolveState>& states, const CurvatureField& f, double window_radius,
                        int n) {
    BlowUpTrace t;
    for (const auto& s : states) t.records.push_back(blowup_record(s.u, s.alpha, s.energy, f, window_radius, n));
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        t.any_clipped = t.any_clipped || t.records[i].window.clipped;
        if (i == 0) continue;
        t.h1_distances.push_back(h1_distance(t.records[i - 1].window.v, t.records[i].window.v));
        if (t.records[i].epsilon > t.records[i - 1].epsilon * (1.0 + 1e-3)) t.epsilon_nonincreasing = false;
    }
    if (t.records.size() >= 3) t.lambda = track_lambda(t.records);
    return t;
}

SemicontinuityReport semicontinuity_check(const BlowUpTrace& trace, const CurvatureField& f) {
    if (trace.records.empty()) throw std::invalid_argument("empty blow-up trace");
    SemicontinuityReport r;
    r.lambda = trace.lambda ? trace.lambda->estimate : trace.records.back().lambda;
    r.window_energy = energy_value(trace.records.back().window.v, f.scaled(r.lambda));
    r.min_level = std::numeric_limits<double>::infinity();
    for (const auto& rec : trace.records) r.min_level = std::min(r.min_level, rec.level);
    const double rhs = r.lambda * r.min_level;
    r.margin = (rhs - r.window_energy) / std::abs(rhs);
    return r;
}

std::vector<AlphaSolveState> synthetic_family(const CurvatureField& f, const SyntheticFamilyOptions& opts) {
    const double d = opts.delta;
    const double d2 = d * d;
    const GridPtr grid = Grid::disk(RadialLayout::with_breaks(1.0, opts.rings, {d2 * d2, d2, d}), opts.n_theta);
    const GridPtr coarse = Grid::sphere(8, 16);
    const SurfaceMap bubble = translate_sphere(make_sphere_bubble(opts.h0, coarse), 1.0 / opts.h0);
    const double d5 = d2 * d2 * d;

    std::vector<AlphaSolveState> out;
    for (double k : opts.ks) {
        AlphaSolveState s;
        s.alpha = 1.0 + 1.0 / (k * k);
        s.u = truncate_bubble(dilate(bubble, k * d5, coarse), d, grid);
        s.energy = energy_value(s.u, f, s.alpha);
        s.grad_l2 = std::sqrt(2.0 * dirichlet(s.u));
        s.grad_sup = gradient_sup(s.u).value;
        s.sup_norm = sup_norm(s.u);
        s.converged = true;
        s.status = SolveStatus::Converged;
        s.message = "synthetic";
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace hbubble
