#include "hbubble/surface_map.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace hbubble {

namespace {
constexpr double kPi = std::numbers::pi;
}

SurfaceMap scaled(const SurfaceMap& u, double s) {
    SurfaceMap out = u;
    for (Vec3& v : out.values) v *= s;
    if (out.far_field) *out.far_field *= s;
    out.source.reset();
    return out;
}

SurfaceMap axpy(const SurfaceMap& u, double s, const SurfaceMap& h) {
    if (u.grid != h.grid) throw GeometryError("maps live on different grids");
    SurfaceMap out = u;
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += s * h.values[k];
    if (out.far_field && h.far_field) *out.far_field += s * *h.far_field;
    out.source.reset();
    return out;
}

SurfaceMap constant_map(const GridPtr& grid, const Vec3& c) {
    SurfaceMap out;
    out.grid = grid;
    out.values.assign(grid->node_count(), c);
    if (grid->kind() == ChartKind::Sphere) out.far_field = c;
    return out;
}

double sup_norm(const SurfaceMap& u) {
    double m = 0.0;
    for (const Vec3& v : u.values) m = std::max(m, norm(v));
    return m;
}

Vec3 stereographic(const Vec2& z) {
    const double mu = 2.0 / (1.0 + z.x * z.x + z.y * z.y);
    return {mu * z.x, mu * z.y, 1.0 - mu};
}

SurfaceMap sample_analytic(const AnalyticMap& map, const GridPtr& grid) {
    SurfaceMap out;
    out.grid = grid;
    out.values.resize(grid->node_count());
    for (std::size_t k = 0; k < grid->node_count(); ++k) {
        const NodeInfo& n = grid->node(k);
        if (n.at_infinity) {
            if (!map.far_field) throw GeometryError("sampling a sphere chart needs the far-field value");
            out.values[k] = *map.far_field;
        } else {
            out.values[k] = map.fn(n.plane);
        }
    }
    if (grid->kind() == ChartKind::Sphere) out.far_field = map.far_field;
    out.source = std::make_shared<AnalyticMap>(map);
    return out;
}

SurfaceMap make_sphere_bubble(double h0, const GridPtr& sphere_grid) {
    if (h0 == 0.0) throw GeometryError("sphere bubble needs nonzero curvature");
    AnalyticMap m;
    m.fn = [h0](const Vec2& z) { return stereographic(z) / h0; };
    m.far_field = stereographic_far_field / h0;
    m.description = "sphere-bubble";
    return sample_analytic(m, sphere_grid);
}

SurfaceMap make_sphere_bubble(double h0, int n_lat, int n_lon) {
    return make_sphere_bubble(h0, Grid::sphere(n_lat, n_lon));
}

SurfaceMap translate_sphere(const SurfaceMap& omega0, double r) {
    const Vec3 shift{0.0, 0.0, -r};
    SurfaceMap out = omega0;
    for (Vec3& v : out.values) v += shift;
    if (out.far_field) *out.far_field += shift;
    if (omega0.source) {
        auto src = std::make_shared<AnalyticMap>(*omega0.source);
        auto fn = omega0.source->fn;
        src->fn = [fn, shift](const Vec2& z) { return fn(z) + shift; };
        if (src->far_field) *src->far_field += shift;
        src->description += "-translated";
        out.source = src;
    }
    return out;
}

double cone_half_angle(double delta) {
    const double d2 = delta * delta;
    return std::acos((1.0 - d2) / (1.0 + d2));
}

SurfaceMap make_cone_map(double delta, int n_r, int n_theta) {
    if (!(delta > 0.0 && delta < 1.0)) throw GeometryError("cone parameter must lie in (0, 1)");
    auto grid = Grid::disk(RadialLayout::with_breaks(1.0, n_r, {delta}), n_theta);
    auto piece = [delta](double r, double lam) {
        const Vec2 z{r * std::cos(lam), r * std::sin(lam)};
        if (r < delta) return stereographic(z);
        if (r >= 1.0) return Vec3{};
        const Vec2 edge{delta * std::cos(lam), delta * std::sin(lam)};
        return ((1.0 - r) / (1.0 - delta)) * stereographic(edge);
    };
    SurfaceMap out;
    out.grid = grid;
    out.values.resize(grid->node_count());
    for (std::size_t k = 0; k < grid->node_count(); ++k) {
        const NodeInfo& n = grid->node(k);
        out.values[k] = n.fixed ? Vec3{} : piece(n.chart.x, n.chart.y);
    }
    auto src = std::make_shared<AnalyticMap>();
    src->fn = [piece](const Vec2& z) { return piece(std::hypot(z.x, z.y), std::atan2(z.y, z.x)); };
    src->description = "cone";
    out.source = src;
    return out;
}

Vec3 truncated_value(const std::function<Vec3(const Vec2&)>& omega, const Vec3& far, double delta, double r,
                     double lam) {
    if (r >= delta) return {};
    const double ld = std::log(delta);
    const double d2 = delta * delta;
    if (r >= d2) return (std::log(r) / ld - 1.0) * far;
    const double d5 = d2 * d2 * delta;
    const Vec2 zeta{r * std::cos(lam) / d5, r * std::sin(lam) / d5};
    if (r >= d2 * d2) return (std::log(r) / (2.0 * ld) - 1.0) * (omega(zeta) - far) + far;
    return omega(zeta);
}

RadialLayout truncation_layout(double delta, int core_count, int n_outer) {
    const double d2 = delta * delta;
    const double d4 = d2 * d2;
    const double core = std::min(2.0 * d4 * delta, d4);
    return RadialLayout::graded(1.0, core, core_count, {d4, d2, delta}, n_outer);
}

SurfaceMap truncate_bubble(const SurfaceMap& omega, double delta, const GridPtr& disk_grid) {
    if (!(delta > 0.0 && delta < 1.0)) throw GeometryError("truncation parameter must lie in (0, 1)");
    if (!omega.far_field) throw GeometryError("truncation needs the far-field value of the bubble");
    if (disk_grid->kind() != ChartKind::Disk) throw GeometryError("truncations live on the disk chart");
    const Vec3 far = *omega.far_field;
    std::function<Vec3(const Vec2&)> fn;
    if (omega.source) fn = omega.source->fn;
    else fn = [&omega](const Vec2& z) { return interpolate(omega, z); };

    SurfaceMap out;
    out.grid = disk_grid;
    out.values.resize(disk_grid->node_count());
    for (std::size_t k = 0; k < disk_grid->node_count(); ++k) {
        const NodeInfo& n = disk_grid->node(k);
        // Ring radii are exact at split rings, so piece selection uses them.
        out.values[k] = n.fixed ? Vec3{} : truncated_value(fn, far, delta, n.chart.x, n.chart.y);
    }
    if (omega.source) {
        auto src = std::make_shared<AnalyticMap>();
        src->fn = [fn, far, delta](const Vec2& z) {
            return truncated_value(fn, far, delta, std::hypot(z.x, z.y), std::atan2(z.y, z.x));
        };
        src->description = "truncated(" + omega.source->description + ")";
        out.source = src;
    }
    return out;
}

SurfaceMap truncate_bubble(const SurfaceMap& omega, double delta, int n_theta) {
    return truncate_bubble(omega, delta, Grid::disk(truncation_layout(delta), n_theta));
}

SurfaceMap dilate(const SurfaceMap& omega, double k, const GridPtr& grid) {
    if (!omega.source) throw GeometryError("dilation needs an analytic source");
    AnalyticMap m = *omega.source;
    auto fn = omega.source->fn;
    m.fn = [fn, k](const Vec2& z) { return fn(Vec2{k * z.x, k * z.y}); };
    m.description += "-dilated";
    return sample_analytic(m, grid);
}

GradientField differentiate(const SurfaceMap& u) {
    const Grid& g = *u.grid;
    GradientField out;
    out.ux.assign(g.node_count(), {});
    out.uy.assign(g.node_count(), {});
    out.weight.assign(g.node_weights().begin(), g.node_weights().end());
    std::vector<char> done(g.node_count(), 0);
    for (const Sample& s : g.samples()) {
        if (done[s.node]) continue;
        done[s.node] = 1;
        Vec3 a, b;
        for (const auto& t : g.terms(s.a_begin, s.a_end)) a += t.coef * u.values[t.node];
        for (const auto& t : g.terms(s.b_begin, s.b_end)) b += t.coef * u.values[t.node];
        out.ux[s.node] = s.conformal * a;
        out.uy[s.node] = s.conformal * b;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Interpolation on ring charts

namespace {

std::array<double, 4> cubic_weights(double t) {
    return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

}  // namespace

namespace {

// Lagrange weights of the nodes first..first+3 (unit spacing) at position x.
std::array<double, 4> lagrange4(double x, int first) {
    std::array<double, 4> w{};
    for (int m = 0; m < 4; ++m) {
        double v = 1.0;
        for (int q = 0; q < 4; ++q)
            if (q != m) v *= (x - (first + q)) / static_cast<double>(m - q);
        w[static_cast<std::size_t>(m)] = v;
    }
    return w;
}

Vec3 interpolate_window(const SurfaceMap& u, const Vec2& z) {
    const Grid& g = *u.grid;
    const int n = g.n_radial();
    const double hw = g.half_width();
    const double h = 2.0 * hw / (n - 1);
    const double fx = (z.x + hw) / h;
    const double fy = (z.y + hw) / h;
    const int ix = std::clamp(static_cast<int>(std::floor(fx)) - 1, 0, n - 4);
    const int iy = std::clamp(static_cast<int>(std::floor(fy)) - 1, 0, n - 4);
    const auto wx = lagrange4(fx, ix);
    const auto wy = lagrange4(fy, iy);
    Vec3 acc;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            acc += (wx[static_cast<std::size_t>(a)] * wy[static_cast<std::size_t>(b)]) *
                   u.values[static_cast<std::size_t>((ix + a) * n + iy + b)];
    return acc;
}

}  // namespace

Vec3 interpolate(const SurfaceMap& u, const Vec2& z) {
    const Grid& g = *u.grid;
    if (g.kind() == ChartKind::Window) return interpolate_window(u, z);
    const bool sphere = g.kind() == ChartKind::Sphere;
    const int N = g.n_radial();
    const int nt = g.n_angular();
    const double dl = 2.0 * kPi / nt;

    const double rho = std::hypot(z.x, z.y);
    double lam = std::atan2(z.y, z.x);
    if (lam < 0.0) lam += 2.0 * kPi;
    const double R = sphere ? 2.0 * std::atan(rho) : rho;
    if (!sphere && R >= g.layout().end()) return {};

    auto ring_value = [&](int ring, double angle) -> Vec3 {
        if (ring < 0) return Vec3{};  // replaced below by mirroring
        if (ring == 0) return u.values[0];
        if (sphere && ring == N) return u.values.back();
        const double x = angle / dl;
        const double j0 = std::floor(x);
        const auto w = cubic_weights(x - j0);
        Vec3 acc;
        for (int m = 0; m < 4; ++m)
            acc += w[static_cast<std::size_t>(m)] * u.values[g.node_index(ring, static_cast<int>(j0) - 1 + m)];
        return acc;
    };
    auto station = [&](int ring) -> std::pair<double, Vec3> {
        if (ring < 0) return {-g.ring_coordinate(-ring), ring_value(-ring, lam + kPi)};
        if (sphere && ring > N) return {2.0 * kPi - g.ring_coordinate(2 * N - ring), ring_value(2 * N - ring, lam + kPi)};
        return {g.ring_coordinate(ring), ring_value(ring, lam)};
    };

    // Segment containing R and the admissible ring range inside it.
    const auto& segs = g.layout().segments();
    int start = 0;
    int s = 0;
    for (; s < static_cast<int>(segs.size()) - 1; ++s) {
        if (R <= segs[static_cast<std::size_t>(s)].end) break;
        start += segs[static_cast<std::size_t>(s)].count;
    }
    const int count = segs[static_cast<std::size_t>(s)].count;
    int lo = start;
    int hi = start + count;
    if (s == 0) lo = -2;
    if (sphere && s == static_cast<int>(segs.size()) - 1) hi = N + 2;

    int i_floor = start;
    while (i_floor + 1 <= start + count && g.ring_coordinate(i_floor + 1) <= R) ++i_floor;
    const int span = std::min(4, hi - lo + 1);
    int i0 = std::clamp(i_floor - 1, lo, hi - span + 1);

    std::array<std::pair<double, Vec3>, 4> pts;
    for (int m = 0; m < span; ++m) pts[static_cast<std::size_t>(m)] = station(i0 + m);
    Vec3 acc;
    for (int m = 0; m < span; ++m) {
        double w = 1.0;
        for (int q = 0; q < span; ++q)
            if (q != m)
                w *= (R - pts[static_cast<std::size_t>(q)].first) /
                     (pts[static_cast<std::size_t>(m)].first - pts[static_cast<std::size_t>(q)].first);
        acc += w * pts[static_cast<std::size_t>(m)].second;
    }
    return acc;
}

}  // namespace hbubble
