#include "hbubble/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hbubble {

namespace {

struct FramePartials {
    Vec3 a;
    Vec3 b;
    Vec3 c;  // stabilizer differences
    Vec3 d;
    double stab() const { return 0.5 * (norm2(c) + norm2(d)); }
};

FramePartials partials(const Grid& g, const Sample& s, std::span<const Vec3> v) {
    FramePartials p;
    for (const auto& t : g.terms(s.a_begin, s.a_end)) p.a += t.coef * v[t.node];
    for (const auto& t : g.terms(s.b_begin, s.b_end)) p.b += t.coef * v[t.node];
    for (const auto& t : g.terms(s.c_begin, s.c_end)) p.c += t.coef * v[t.node];
    for (const auto& t : g.terms(s.d_begin, s.d_end)) p.d += t.coef * v[t.node];
    return p;
}

// ((1 + mu^2 G)^alpha - 1) / (2 alpha mu^2), continuous as mu -> 0.
double alpha_density(double mu2, double G, double alpha) {
    if (mu2 == 0.0) return 0.5 * G;
    const double x = mu2 * G;
    return std::expm1(alpha * std::log1p(x)) / (2.0 * alpha * mu2);
}

struct Totals {
    double D = 0.0;
    double D_alpha = 0.0;
    double V = 0.0;
};

Totals accumulate(const SurfaceMap& u, const CurvatureField& f, double alpha, std::vector<Vec3>* grad) {
    const Grid& g = *u.grid;
    if (u.values.size() != g.node_count()) throw std::invalid_argument("map size does not match its grid");
    Totals t;
    if (grad) grad->assign(g.node_count(), Vec3{});
    const bool plain = alpha == 1.0;
    const auto constant = f.constant_value();

    for (const Sample& s : g.samples()) {
        const Vec3& x = u.values[s.node];
        const FramePartials fp = partials(g, s, u.values);
        const Vec3& a = fp.a;
        const Vec3& b = fp.b;
        const double G = norm2(a) + norm2(b);
        const double mu2 = s.conformal * s.conformal;
        t.D += s.weight * (0.5 * G + fp.stab());
        if (!plain) t.D_alpha += s.weight * (alpha_density(mu2, G, alpha) + fp.stab());

        MhJet jet;
        if (constant) jet.m = *constant / 3.0;
        else jet = mH_jet(f, x, kDefaultMhOrder, false);
        const Vec3 c = cross(a, b);
        const double uc = dot(x, c);
        t.V += s.weight * jet.m * uc;

        if (grad) {
            const double c1 = plain ? 1.0 : std::pow(1.0 + mu2 * G, alpha - 1.0);
            const Vec3 q = jet.m * x;
            const Vec3 fu = 2.0 * (jet.m * c + uc * jet.grad);
            const Vec3 fa = c1 * a + 2.0 * cross(b, q);
            const Vec3 fb = c1 * b + 2.0 * cross(q, a);
            auto& gr = *grad;
            gr[s.node] += s.weight * fu;
            for (const auto& term : g.terms(s.a_begin, s.a_end)) gr[term.node] += (s.weight * term.coef) * fa;
            for (const auto& term : g.terms(s.b_begin, s.b_end)) gr[term.node] += (s.weight * term.coef) * fb;
            for (const auto& term : g.terms(s.c_begin, s.c_end)) gr[term.node] += (s.weight * term.coef) * fp.c;
            for (const auto& term : g.terms(s.d_begin, s.d_end)) gr[term.node] += (s.weight * term.coef) * fp.d;
        }
    }
    if (plain) t.D_alpha = t.D;
    return t;
}

void check_alpha(double alpha) {
    if (!(alpha >= 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in [1, 2)");
}

void check_same_grid(const SurfaceMap& u, const SurfaceMap& h) {
    if (u.grid != h.grid) throw std::invalid_argument("maps live on different charts");
}

std::vector<FramePartials> node_partials(const SurfaceMap& u) {
    const Grid& g = *u.grid;
    std::vector<FramePartials> out(g.node_count());
    std::vector<char> done(g.node_count(), 0);
    for (const Sample& s : g.samples()) {
        if (done[s.node]) continue;
        done[s.node] = 1;
        out[s.node] = partials(g, s, u.values);
    }
    return out;
}

Residual finish_residual(const Grid& g, std::vector<Vec3> lap, const std::vector<Vec3>& rhs) {
    Residual r;
    r.field.assign(g.node_count(), Vec3{});
    double num = 0.0;
    double den = 0.0;
    const auto& mask = g.interior_mask();
    const auto w = g.node_weights();
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!mask[k]) continue;
        r.field[k] = lap[k] - rhs[k];
        num += w[k] * norm2(r.field[k]);
        den += w[k] * norm2(lap[k]);
    }
    r.norm = std::sqrt(num);
    r.relative = den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? 1.0 : 0.0);
    return r;
}

}  // namespace

double dirichlet(const SurfaceMap& u) {
    const Grid& g = *u.grid;
    double d = 0.0;
    for (const Sample& s : g.samples()) {
        const FramePartials p = partials(g, s, u.values);
        d += s.weight * (0.5 * (norm2(p.a) + norm2(p.b)) + p.stab());
    }
    return d;
}

double dirichlet_alpha(const SurfaceMap& u, double alpha) {
    check_alpha(alpha);
    const Grid& g = *u.grid;
    double d = 0.0;
    for (const Sample& s : g.samples()) {
        const FramePartials p = partials(g, s, u.values);
        const double G = norm2(p.a) + norm2(p.b);
        d += s.weight * ((alpha == 1.0 ? 0.5 * G : alpha_density(s.conformal * s.conformal, G, alpha)) + p.stab());
    }
    return d;
}

double volume(const SurfaceMap& u, const CurvatureField& f) { return accumulate(u, f, 1.0, nullptr).V; }

double energy_value(const SurfaceMap& u, const CurvatureField& f, double alpha) {
    check_alpha(alpha);
    const Totals t = accumulate(u, f, alpha, nullptr);
    return t.D_alpha + 2.0 * t.V;
}

std::vector<Vec3> energy_gradient(const SurfaceMap& u, const CurvatureField& f, double alpha, double* energy_out) {
    check_alpha(alpha);
    std::vector<Vec3> grad;
    const Totals t = accumulate(u, f, alpha, &grad);
    if (energy_out) *energy_out = t.D_alpha + 2.0 * t.V;
    return grad;
}

EnergyBreakdown energy(const SurfaceMap& u, const CurvatureField& f) {
    const Totals t = accumulate(u, f, 1.0, nullptr);
    EnergyBreakdown e;
    e.D = t.D;
    e.V_H = t.V;
    e.E_H = t.D + 2.0 * t.V;
    e.grad_sup = gradient_sup(u).value;
    e.defect_energy_identity = energy_identity_defect(u, f, 1.0);
    e.defect_conformal = conformality(u).norm;
    e.residual_hsystem = hsystem_residual(u, f, 1.0).norm;
    return e;
}

EnergyBreakdown alpha_energy(const SurfaceMap& u, const CurvatureField& f, double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (1, 2)");
    EnergyBreakdown e = energy(u, f);
    e.D_alpha = dirichlet_alpha(u, alpha);
    e.E_alpha = *e.D_alpha + 2.0 * e.V_H;
    return e;
}

double first_variation(const SurfaceMap& u, const CurvatureField& f, const SurfaceMap& h) {
    return alpha_first_variation(u, f, h, 1.0);
}

double alpha_first_variation(const SurfaceMap& u, const CurvatureField& f, const SurfaceMap& h, double alpha) {
    check_same_grid(u, h);
    const auto grad = energy_gradient(u, f, alpha);
    double s = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) s += dot(grad[k], h.values[k]);
    return s;
}

double first_variation_formula(const SurfaceMap& u, const CurvatureField& f, const SurfaceMap& h, double alpha) {
    check_same_grid(u, h);
    check_alpha(alpha);
    const Grid& g = *u.grid;
    double s = 0.0;
    for (const Sample& smp : g.samples()) {
        const FramePartials p = partials(g, smp, u.values);
        const FramePartials q = partials(g, smp, h.values);
        const double mu2 = smp.conformal * smp.conformal;
        const double c1 = alpha == 1.0 ? 1.0 : std::pow(1.0 + mu2 * (norm2(p.a) + norm2(p.b)), alpha - 1.0);
        const Vec3& x = u.values[smp.node];
        s += smp.weight * (c1 * (dot(p.a, q.a) + dot(p.b, q.b)) + dot(p.c, q.c) + dot(p.d, q.d) +
                           2.0 * f.value(x) * dot(h.values[smp.node], cross(p.a, p.b)));
    }
    return s;
}

SurfaceMap gradient_map(const SurfaceMap& u, const CurvatureField& f, std::optional<double> alpha) {
    const auto grad = energy_gradient(u, f, alpha.value_or(1.0));
    SurfaceMap g;
    g.grid = u.grid;
    g.values.resize(grad.size());
    const auto w = u.grid->node_weights();
    for (std::size_t k = 0; k < grad.size(); ++k)
        g.values[k] = u.grid->node(k).fixed ? Vec3{} : grad[k] / w[k];
    if (u.grid->kind() == ChartKind::Sphere) g.far_field = g.values.back();
    return g;
}

double l2_norm(const SurfaceMap& g) {
    const auto w = g.grid->node_weights();
    double s = 0.0;
    for (std::size_t k = 0; k < g.values.size(); ++k) s += w[k] * norm2(g.values[k]);
    return std::sqrt(s);
}

Residual hsystem_residual(const SurfaceMap& u, const CurvatureField& f, double lambda) {
    const Grid& g = *u.grid;
    const auto p = node_partials(u);
    std::vector<Vec3> rhs(g.node_count());
    for (std::size_t k = 0; k < g.node_count(); ++k)
        rhs[k] = (2.0 * lambda * f.value(u.values[k])) * cross(p[k].a, p[k].b);
    return finish_residual(g, g.laplacian(u.values), rhs);
}

Residual alpha_residual(const SurfaceMap& u, const CurvatureField& f, double alpha) {
    check_alpha(alpha);
    const Grid& g = *u.grid;
    if (g.kind() == ChartKind::Sphere) throw std::invalid_argument("alpha residual is defined on the disk");
    const auto p = node_partials(u);
    std::vector<double> coef(g.node_count());
    std::vector<Vec3> rhs(g.node_count());
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        coef[k] = std::pow(1.0 + norm2(p[k].a) + norm2(p[k].b), alpha - 1.0);
        rhs[k] = (2.0 * f.value(u.values[k])) * cross(p[k].a, p[k].b);
    }
    return finish_residual(g, g.laplacian(u.values, coef), rhs);
}

ConformalityDefect conformality(const SurfaceMap& u) {
    const Grid& g = *u.grid;
    double num = 0.0;
    double den = 0.0;
    for (const Sample& s : g.samples()) {
        const FramePartials fp = partials(g, s, u.values);
        const Vec3& a = fp.a;
        const Vec3& b = fp.b;
        const double mu2 = s.conformal * s.conformal;
        const double d1 = norm2(a) - norm2(b);
        const double d2 = dot(a, b);
        const double G = norm2(a) + norm2(b);
        num += s.weight * mu2 * (d1 * d1 + d2 * d2);
        den += s.weight * mu2 * G * G;
    }
    ConformalityDefect c;
    c.norm = std::sqrt(num);
    c.relative = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return c;
}

double energy_identity_defect(const SurfaceMap& u, const CurvatureField& f, double lambda) {
    const Grid& g = *u.grid;
    double d = 0.0;
    double vol = 0.0;
    for (const Sample& s : g.samples()) {
        const FramePartials p = partials(g, s, u.values);
        const Vec3& x = u.values[s.node];
        d += s.weight * (0.5 * (norm2(p.a) + norm2(p.b)) + p.stab());
        vol += s.weight * f.value(x) * dot(x, cross(p.a, p.b));
    }
    return std::abs(d + lambda * vol);
}

std::optional<double> isoperimetric_ratio(const SurfaceMap& u, const CurvatureField& f) {
    const Totals t = accumulate(u, f, 1.0, nullptr);
    if (t.V == 0.0) return std::nullopt;
    return t.D / std::pow(std::abs(t.V), 2.0 / 3.0);
}

GradientSup gradient_sup(const SurfaceMap& u) {
    const Grid& g = *u.grid;
    GradientSup best;
    for (const Sample& s : g.samples()) {
        const FramePartials fp = partials(g, s, u.values);
        const Vec3& a = fp.a;
        const Vec3& b = fp.b;
        const double v = s.conformal * std::sqrt(norm2(a) + norm2(b));
        if (v > best.value || (v == best.value && s.node < best.node)) {
            best.value = v;
            best.node = s.node;
        }
    }
    return best;
}

std::vector<HessianEntry> energy_hessian(const SurfaceMap& u, const CurvatureField& f, double alpha) {
    check_alpha(alpha);
    const Grid& g = *u.grid;
    const bool plain = alpha == 1.0;
    const auto constant = f.constant_value();
    std::vector<HessianEntry> out;

    struct Local {
        std::uint32_t node;
        double cu, ca, cb, cc, cd;
    };
    std::vector<Local> local;

    for (const Sample& s : g.samples()) {
        const Vec3& x = u.values[s.node];
        const FramePartials fp = partials(g, s, u.values);
        const Vec3& a = fp.a;
        const Vec3& b = fp.b;
        const double G = norm2(a) + norm2(b);
        const double mu2 = s.conformal * s.conformal;
        const double c1 = plain ? 1.0 : std::pow(1.0 + mu2 * G, alpha - 1.0);
        const double c2 = plain ? 0.0 : 2.0 * (alpha - 1.0) * std::pow(1.0 + mu2 * G, alpha - 2.0) * mu2;

        MhJet jet;
        if (constant) jet.m = *constant / 3.0;
        else jet = mH_jet(f, x, kDefaultMhOrder, true);
        const Vec3 c = cross(a, b);
        const Vec3 q = jet.m * x;
        const Mat3 dq_t = Mat3::identity(jet.m) + Mat3::outer(jet.grad, x);  // (DQ)^T

        const Mat3 Fuu = 2.0 * (dot(x, c) * jet.hess + Mat3::outer(c, jet.grad) + Mat3::outer(jet.grad, c));
        const Mat3 Fua = 2.0 * (dq_t * ((-1.0) * Mat3::skew(b)));
        const Mat3 Fub = 2.0 * (dq_t * Mat3::skew(a));
        const Mat3 Faa = Mat3::identity(c1) + c2 * Mat3::outer(a, a);
        const Mat3 Fbb = Mat3::identity(c1) + c2 * Mat3::outer(b, b);
        const Mat3 Fab = c2 * Mat3::outer(a, b) + (-2.0) * Mat3::skew(q);
        const Mat3 Fau = Fua.transposed();
        const Mat3 Fbu = Fub.transposed();
        const Mat3 Fba = Fab.transposed();

        local.clear();
        auto add = [&](std::uint32_t node, double cu, double ca, double cb, double cc, double cd) {
            for (auto& l : local)
                if (l.node == node) {
                    l.cu += cu;
                    l.ca += ca;
                    l.cb += cb;
                    l.cc += cc;
                    l.cd += cd;
                    return;
                }
            local.push_back({node, cu, ca, cb, cc, cd});
        };
        add(s.node, 1.0, 0.0, 0.0, 0.0, 0.0);
        for (const auto& t : g.terms(s.a_begin, s.a_end)) add(t.node, 0.0, t.coef, 0.0, 0.0, 0.0);
        for (const auto& t : g.terms(s.b_begin, s.b_end)) add(t.node, 0.0, 0.0, t.coef, 0.0, 0.0);
        for (const auto& t : g.terms(s.c_begin, s.c_end)) add(t.node, 0.0, 0.0, 0.0, t.coef, 0.0);
        for (const auto& t : g.terms(s.d_begin, s.d_end)) add(t.node, 0.0, 0.0, 0.0, 0.0, t.coef);

        for (const Local& k : local) {
            if (g.node(k.node).fixed) continue;
            for (const Local& l : local) {
                if (g.node(l.node).fixed) continue;
                Mat3 blk = (k.cu * l.cu) * Fuu + (k.cu * l.ca) * Fua + (k.cu * l.cb) * Fub +
                           (k.ca * l.cu) * Fau + (k.ca * l.ca) * Faa + (k.ca * l.cb) * Fab +
                           (k.cb * l.cu) * Fbu + (k.cb * l.ca) * Fba + (k.cb * l.cb) * Fbb +
                           Mat3::identity(k.cc * l.cc + k.cd * l.cd);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        const double v = s.weight * blk(i, j);
                        if (v != 0.0)
                            out.push_back({3 * k.node + static_cast<std::uint32_t>(i),
                                           3 * l.node + static_cast<std::uint32_t>(j), v});
                    }
            }
        }
    }
    return out;
}

}  // namespace hbubble
