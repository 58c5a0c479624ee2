#include "hbubble/alpha_solver.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <boost/math/tools/roots.hpp>

#include "hbubble/functionals.hpp"
#include "hbubble/mountain_pass.hpp"

namespace hbubble {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::NotConverged: return "not-converged";
        case SolveStatus::Collapsed: return "collapsed";
    }
    return "not-converged";
}

double h1_lower_bound(double M_bar, double S_H) {
    const double k = (2.0 - M_bar) / 3.0;
    return 0.5 * k * k * S_H * S_H * S_H;
}

namespace {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

// Unknowns are the three components of every free node.
class Problem {
public:
    Problem(const CurvatureField& f, double alpha, const SurfaceMap& templ) : f_(f), alpha_(alpha), templ_(templ) {
        const Grid& g = *templ.grid;
        slot_.assign(g.node_count(), -1);
        for (std::size_t k = 0; k < g.node_count(); ++k)
            if (!g.node(k).fixed) {
                slot_[k] = static_cast<int>(nodes_.size());
                nodes_.push_back(static_cast<std::uint32_t>(k));
            }
        inv_w_.resize(static_cast<Eigen::Index>(3 * nodes_.size()));
        const auto w = g.node_weights();
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (int c = 0; c < 3; ++c) inv_w_(static_cast<Eigen::Index>(3 * i + c)) = 1.0 / w[nodes_[i]];

        stiffness_ = assemble(energy_hessian(templ_, CurvatureField::constant(0.0), 1.0));
        chol_.compute(stiffness_);
        if (chol_.info() != Eigen::Success) throw std::runtime_error("stiffness factorization failed");
    }

    Eigen::Index size() const { return static_cast<Eigen::Index>(3 * nodes_.size()); }

    Vec pack(const SurfaceMap& u) const {
        Vec x(size());
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (int c = 0; c < 3; ++c) x(static_cast<Eigen::Index>(3 * i + c)) = u.values[nodes_[i]][c];
        return x;
    }

    SurfaceMap unpack(const Vec& x) const {
        SurfaceMap u;
        u.grid = templ_.grid;
        u.values.assign(templ_.grid->node_count(), Vec3{});
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (int c = 0; c < 3; ++c) u.values[nodes_[i]][c] = x(static_cast<Eigen::Index>(3 * i + c));
        return u;
    }

    double energy(const Vec& x) const { return energy_value(unpack(x), f_, alpha_); }

    Vec gradient(const Vec& x, double* e) const {
        const auto g = energy_gradient(unpack(x), f_, alpha_, e);
        Vec out(size());
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (int c = 0; c < 3; ++c) out(static_cast<Eigen::Index>(3 * i + c)) = g[nodes_[i]][c];
        return out;
    }

    // L2 norm of the representer g_k / w_k.
    double grad_norm(const Vec& g) const { return std::sqrt(g.cwiseProduct(g).dot(inv_w_)); }

    // int |grad u|^2 = x^T K x.
    double grad_sq(const Vec& x) const { return x.dot(stiffness_ * x); }

    Vec precondition(const Vec& g) const { return chol_.solve(g); }
    const SpMat& stiffness() const { return stiffness_; }

    SpMat hessian(const Vec& x) const { return assemble(energy_hessian(unpack(x), f_, alpha_)); }

private:
    SpMat assemble(const std::vector<HessianEntry>& entries) const {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(entries.size());
        for (const auto& e : entries) {
            const int r = slot_[e.row / 3];
            const int c = slot_[e.col / 3];
            if (r < 0 || c < 0) continue;
            t.emplace_back(3 * r + static_cast<int>(e.row % 3), 3 * c + static_cast<int>(e.col % 3), e.value);
        }
        SpMat m(size(), size());
        m.setFromTriplets(t.begin(), t.end());
        return m;
    }

    const CurvatureField& f_;
    double alpha_;
    const SurfaceMap& templ_;
    std::vector<int> slot_;
    std::vector<std::uint32_t> nodes_;
    Vec inv_w_;
    SpMat stiffness_;
    Eigen::SimplicialLDLT<SpMat> chol_;
};

// Largest-energy point on the ray s -> s x for s in (0, s_cap]: the first
// downward zero of the ray derivative, searched outward from s = 1.
std::optional<double> ray_max(const Problem& p, const Vec& x, double s_cap) {
    auto slope = [&](double s) {
        double e = 0.0;
        return p.gradient(s * x, &e).dot(x);
    };
    double lo = 1.0;
    double hi = 1.0;
    double g_lo = 0.0;
    double g_hi = 0.0;
    const double g1 = slope(1.0);
    if (g1 > 0.0) {
        lo = 1.0;
        g_lo = g1;
        hi = 1.0;
        while (true) {
            if (hi >= s_cap) return std::nullopt;
            hi = std::min(2.0 * hi, s_cap);
            g_hi = slope(hi);
            if (g_hi <= 0.0) break;
            lo = hi;
            g_lo = g_hi;
        }
    } else {
        hi = 1.0;
        g_hi = g1;
        lo = 1.0;
        while (true) {
            lo *= 0.5;
            if (lo < 1e-8) return std::nullopt;
            g_lo = slope(lo);
            if (g_lo > 0.0) break;
            hi = lo;
            g_hi = g_lo;
        }
    }
    if (g_hi == 0.0) return hi;
    boost::uintmax_t iters = 80;
    auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-13 * std::max(std::abs(a), std::abs(b)); };
    const auto r = boost::math::tools::toms748_solve(slope, lo, hi, g_lo, g_hi, tol, iters);
    return 0.5 * (r.first + r.second);
}

void apply_perturbation(SurfaceMap& u, std::uint64_t seed, double amplitude) {
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        if (u.grid->node(k).fixed) continue;
        for (int c = 0; c < 3; ++c) u.values[k][c] += amplitude * unit();
    }
}

}  // namespace

AlphaSolveState solve_alpha(const CurvatureField& f, double alpha, const SurfaceMap& init, const SolverOptions& opts) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (1, 2)");
    if (init.grid->kind() != ChartKind::Disk) throw std::invalid_argument("the alpha problem lives on the disk chart");
    if (!(dirichlet(init) > 0.0)) throw GeometryError("initial map has zero Dirichlet energy");

    SurfaceMap start = init;
    start.source.reset();
    if (opts.seed && opts.perturbation != 0.0) apply_perturbation(start, *opts.seed, opts.perturbation);

    AlphaSolveState st;
    st.alpha = alpha;
    const FieldScalars scalars = estimate_scalars(f, std::max(4.0, 2.0 * sup_norm(start)), 4096);
    if (scalars.M_bar_H >= 1.0) st.message = "warning: sampled M_bar_H >= 1; ";

    const Problem prob(f, alpha, start);
    const auto S_H = constant_field_S(f);
    // Collapse threshold: half the lower H1 bound on |grad u|_2. Without a
    // known S_H the constant-curvature value at sup|H| is used.
    const double S_eff = S_H ? *S_H : isoperimetric_constant() / std::cbrt(std::max(scalars.sup_H, 1e-12) * std::max(scalars.sup_H, 1e-12));
    const double collapse_level = 0.5 * std::sqrt(h1_lower_bound(std::min(scalars.M_bar_H, 1.0), S_eff));

    Vec x = prob.pack(start);
    bool on_ray = false;
    if (auto s = ray_max(prob, x, opts.ray_max_scale)) {
        x *= *s;
        on_ray = true;
    }

    double e = 0.0;
    Vec g = prob.gradient(x, &e);
    double step = 1.0;
    int below = 0;
    int newton_cooldown = 0;
    int it = 0;
    for (;; ++it) {
        const double gn = prob.grad_norm(g);
        const double gl2 = std::sqrt(std::max(prob.grad_sq(x), 0.0));
        if (opts.trace) opts.trace({it, on_ray ? "minmax" : "descent", e, gn, gl2, step});
        if (gn <= opts.tol) {
            st.converged = true;
            st.status = SolveStatus::Converged;
            break;
        }
        below = gl2 < collapse_level ? below + 1 : 0;
        if (below >= 3) {
            st.status = SolveStatus::Collapsed;
            st.message += "collapse: descent fell below the local-minimum barrier";
            break;
        }
        if (it >= opts.max_iter) {
            st.message += "iteration limit reached";
            break;
        }

        if (opts.newton && gn < opts.newton_threshold && newton_cooldown == 0 && st.newton_steps < opts.newton_max) {
            // Damped Newton on the gradient-norm merit; a small stiffness shift
            // keeps the symmetry directions of the energy from blowing up.
            const double mu = std::min(1e-3, gn);
            const SpMat A = prob.hessian(x) + mu * prob.stiffness();
            Eigen::SparseLU<SpMat> lu;
            lu.compute(A);
            bool accepted = false;
            if (lu.info() == Eigen::Success) {
                const Vec d = lu.solve(-g);
                for (double t = 1.0; t > 1e-3; t *= 0.5) {
                    double et = 0.0;
                    const Vec xt = x + t * d;
                    const Vec gt = prob.gradient(xt, &et);
                    if (prob.grad_norm(gt) < (1.0 - 1e-4 * t) * gn) {
                        x = xt;
                        g = gt;
                        e = et;
                        step = t;
                        accepted = true;
                        break;
                    }
                }
            }
            ++st.newton_steps;
            if (opts.trace) opts.trace({it, "newton", e, prob.grad_norm(g), gl2, accepted ? step : 0.0});
            if (accepted) continue;
            newton_cooldown = 25;
        }
        if (newton_cooldown > 0) --newton_cooldown;

        if (!on_ray) {
            if (auto s = ray_max(prob, x, opts.ray_max_scale)) {
                x *= *s;
                on_ray = true;
                g = prob.gradient(x, &e);
                continue;
            }
        }

        Vec p = prob.precondition(g);
        if (on_ray) {
            // Remove the ray component in the stiffness inner product: p^T K x = g^T x.
            p -= (g.dot(x) / prob.grad_sq(x)) * x;
        }
        const double slope = g.dot(p);
        if (!(slope > 0.0)) {
            st.message += "stagnation: no descent direction";
            break;
        }
        bool accepted = false;
        double t = std::min(2.0 * step, 4.0);
        for (int k = 0; k < 50; ++k, t *= 0.5) {
            Vec xt = x - t * p;
            if (on_ray) {
                const auto s = ray_max(prob, xt, opts.ray_max_scale);
                if (!s) continue;
                xt *= *s;
            }
            double et = 0.0;
            const Vec gt = prob.gradient(xt, &et);
            if (et <= e - 1e-4 * t * slope) {
                x = std::move(xt);
                g = gt;
                e = et;
                step = t;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (opts.newton && newton_cooldown > 0 && gn < opts.newton_threshold) {
                newton_cooldown = 0;
                continue;
            }
            st.message += "stagnation: line search failed";
            break;
        }
    }

    st.iterations = it;
    st.u = prob.unpack(x);
    st.energy = e;
    st.grad_norm = prob.grad_norm(g);
    st.grad_l2 = std::sqrt(std::max(prob.grad_sq(x), 0.0));
    st.grad_sup = gradient_sup(st.u).value;
    st.sup_norm = sup_norm(st.u);
    st.residual = alpha_residual(st.u, f, alpha).norm;
    if (st.converged && st.message.empty()) st.message = "converged";
    return st;
}

std::vector<AlphaSolveState> continuation(const CurvatureField& f, const std::vector<double>& alphas,
                                          const SurfaceMap& init, const SolverOptions& opts) {
    if (alphas.empty()) throw std::invalid_argument("empty alpha schedule");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 1.0 && alphas[i] < 2.0)) throw std::invalid_argument("alpha schedule must lie in (1, 2)");
        if (i > 0 && !(alphas[i] < alphas[i - 1])) throw std::invalid_argument("alpha schedule must be strictly decreasing");
    }
    std::vector<AlphaSolveState> out;
    const SurfaceMap* warm = &init;
    for (double a : alphas) {
        out.push_back(solve_alpha(f, a, *warm, opts));
        if (!out.back().converged) break;
        warm = &out.back().u;
    }
    return out;
}

std::vector<double> dyadic_schedule(int n) {
    std::vector<double> a;
    for (int j = 1; j <= n; ++j) a.push_back(1.0 + std::ldexp(1.0, -j));
    return a;
}

H1BoundsReport verify_h1_bounds(const AlphaSolveState& state, const CurvatureField& f,
                                std::optional<double> S_override) {
    const auto S = S_override ? S_override : constant_field_S(f);
    if (!S) throw FieldError("H1 bounds need S_H: supply it for nonconstant fields");
    H1BoundsReport r;
    r.S_H = *S;
    r.value = 2.0 * dirichlet(state.u);
    r.M_bar = estimate_scalars(f, std::max(4.0, 2.0 * sup_norm(state.u)), 4096).M_bar_H;
    r.lower = h1_lower_bound(r.M_bar, r.S_H);
    r.lower_ok = r.value > r.lower;
    r.lower_margin = (r.value - r.lower) / r.lower;
    const double k = 1.0 / (2.0 * state.alpha) - 1.0 / 3.0 - r.M_bar / 6.0;
    if (k > 0.0) {
        r.upper = state.energy / k;
        r.upper_ok = r.value < *r.upper;
        r.upper_margin = (*r.upper - r.value) / *r.upper;
    } else {
        r.upper_indeterminate = true;
    }
    return r;
}

LinftyReport verify_linfty_bound(const AlphaSolveState& state, const CurvatureField& f, double C) {
    const bool far_constant = f.kind() == FieldKind::Constant || f.kind() == FieldKind::ConstantFarOut;
    if (!far_constant || !f.h_inf() || !f.r0()) throw FieldError("the L-infinity bound needs a constant-far-out field");
    LinftyReport r;
    r.H0 = *f.h_inf();
    r.R0 = *f.r0();
    r.C = C;
    r.sup_norm = sup_norm(state.u);
    const double g2 = 2.0 * dirichlet(state.u);
    r.bound = C * std::abs(r.H0) * g2 + r.R0;
    r.ratio = (r.H0 != 0.0 && g2 > 0.0) ? (r.sup_norm - r.R0) / (std::abs(r.H0) * g2) : 0.0;
    r.holds = r.sup_norm <= r.bound;
    return r;
}

}  // namespace hbubble
