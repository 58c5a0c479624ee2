#include "hbubble/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "hbubble/functionals.hpp"
#include "hbubble/util.hpp"

namespace hbubble {

namespace {

constexpr double kPi = std::numbers::pi;

struct RayPoint {
    double f;
    double df;
};

RayPoint ray_point(const SurfaceMap& u, const CurvatureField& f, double s, double alpha) {
    const SurfaceMap su = scaled(u, s);
    double e = 0.0;
    const auto grad = energy_gradient(su, f, alpha, &e);
    double d = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) d += dot(grad[k], u.values[k]);
    return {e, d};
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

std::optional<double> fit_cubic_leading(const std::vector<double>& s, const std::vector<double>& f) {
    if (s.size() < 4 || s.back() <= 0.0) return std::nullopt;
    const double scale = s.back();
    Eigen::MatrixXd A(static_cast<Eigen::Index>(s.size()), 4);
    Eigen::VectorXd b(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double t = s[i] / scale;
        const auto r = static_cast<Eigen::Index>(i);
        A(r, 0) = 1.0;
        A(r, 1) = t;
        A(r, 2) = t * t;
        A(r, 3) = t * t * t;
        b(r) = f[i];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    return c(3) / (scale * scale * scale);
}

}  // namespace

RadialPathProfile radial_profile(const SurfaceMap& u, const CurvatureField& f, double s_max, int n,
                                 std::optional<double> alpha) {
    if (n < 32) throw std::invalid_argument("radial profile needs at least 32 samples");
    if (!(s_max > 0.0)) throw std::invalid_argument("s_max must be positive");
    if (!(dirichlet(u) > 0.0)) throw GeometryError("degenerate map: the Dirichlet energy vanishes");
    const double a = alpha.value_or(1.0);

    RadialPathProfile p;
    for (int round = 0;; ++round) {
        p.s.assign(static_cast<std::size_t>(n), 0.0);
        p.f.assign(static_cast<std::size_t>(n), 0.0);
        p.df.assign(static_cast<std::size_t>(n), 0.0);
        p.negative_found = false;
        p.s0.reset();
        for (int i = 0; i < n; ++i) {
            const double s = s_max * i / (n - 1);
            const auto pt = i == 0 ? RayPoint{0.0, 0.0} : ray_point(u, f, s, a);
            const auto k = static_cast<std::size_t>(i);
            p.s[k] = s;
            p.f[k] = pt.f;
            p.df[k] = pt.df;
            if (pt.f < 0.0 && !p.negative_found) {
                p.negative_found = true;
                p.s0 = s;
            }
        }
        p.s_max = s_max;
        p.doublings = round;
        if (p.negative_found || round == 8) break;
        s_max *= 2.0;
    }

    int last = 0;
    for (std::size_t i = 1; i < p.df.size(); ++i) {
        const int sg = sign_of(p.df[i]);
        if (sg == 0) continue;
        if (last != 0 && sg != last) ++p.sign_changes;
        last = sg;
    }
    p.cubic_leading = fit_cubic_leading(p.s, p.f);

    std::optional<std::size_t> best;
    for (std::size_t i = 1; i + 1 < p.f.size(); ++i) {
        if (p.f[i] > p.f[i - 1] && p.f[i] >= p.f[i + 1]) {
            p.local_maxima.push_back(p.s[i]);
            if (!best || p.f[i] > p.f[*best]) best = i;
        }
    }
    if (!best) {
        bool increasing = true;
        for (std::size_t i = 1; i < p.f.size(); ++i) increasing = increasing && p.f[i] > p.f[i - 1];
        p.unbounded_above = increasing;
        return p;
    }

    // Refine on the bracketing interval: root of f' when it changes sign there,
    // otherwise a bracketed scalar maximization of f.
    const std::size_t i = *best;
    double lo = p.s[i - 1];
    double hi = p.s[i + 1];
    double s_bar = p.s[i];
    auto dfun = [&](double s) { return ray_point(u, f, s, a).df; };
    double d_lo = p.df[i - 1];
    double d_hi = p.df[i + 1];
    if (d_lo > 0.0 && d_hi < 0.0) {
        boost::uintmax_t iters = 200;
        auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-10 * std::max(std::abs(x), std::abs(y)); };
        const auto r = boost::math::tools::toms748_solve(dfun, lo, hi, d_lo, d_hi, tol, iters);
        s_bar = 0.5 * (r.first + r.second);
    } else {
        auto neg = [&](double s) { return -energy_value(scaled(u, s), f, a); };
        s_bar = boost::math::tools::brent_find_minima(neg, lo, hi, std::numeric_limits<double>::digits / 2).first;
    }
    const SurfaceMap at = scaled(u, s_bar);
    p.s_bar = s_bar;
    p.f_max = energy_value(at, f, a);
    p.V_at_max = volume(at, f);
    return p;
}

const char* to_string(StarCondition c) {
    switch (c) {
        case StarCondition::Satisfied: return "satisfied";
        case StarCondition::Violated: return "violated";
        case StarCondition::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

namespace {

double family_curvature(const CurvatureField& f) {
    if (auto h = f.h_inf(); h && *h != 0.0) return std::abs(*h);
    const double h0 = f.value(Vec3{});
    return h0 != 0.0 ? std::abs(h0) : 1.0;
}

// The sphere bubble shifted so that its far field is the origin; truncating it
// then costs no energy in the logarithmic collar.
SurfaceMap centred_bubble(double h) { return translate_sphere(make_sphere_bubble(h, 8, 16), 1.0 / h); }

Candidate truncation_candidate(double h, double delta, int n_theta) {
    return {"truncation:" + format_short(delta), truncate_bubble(centred_bubble(h), delta, n_theta)};
}

Candidate cone_candidate(double delta, int rings, int n_theta) {
    return {"cone:" + format_short(delta), make_cone_map(delta, rings, n_theta)};
}

Candidate translated_candidate(double h, double r, double delta, int n_theta) {
    const SurfaceMap w = translate_sphere(make_sphere_bubble(h, 8, 16), r);
    return {"translated:" + format_short(r), truncate_bubble(w, delta, n_theta)};
}

}  // namespace

std::vector<Candidate> default_family(const CurvatureField& f, const FamilyOptions& opts) {
    const double h = family_curvature(f);
    std::vector<Candidate> out;
    for (double d : opts.truncation_deltas) out.push_back(truncation_candidate(h, d, opts.n_theta));
    for (double d : opts.cone_deltas) out.push_back(cone_candidate(d, opts.cone_rings, opts.n_theta));
    for (double r : opts.translation_radii)
        out.push_back(translated_candidate(h, r, opts.translation_delta, opts.n_theta));
    return out;
}

std::vector<Candidate> parse_family(const std::string& text, const CurvatureField& f, const FamilyOptions& opts) {
    const double h = family_curvature(f);
    std::vector<Candidate> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        if (item == "default") {
            auto d = default_family(f, opts);
            out.insert(out.end(), d.begin(), d.end());
            continue;
        }
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("family entry needs a parameter: " + item);
        const std::string kind = item.substr(0, colon);
        const double value = parse_double(item.substr(colon + 1), 0);
        if (kind == "truncation") out.push_back(truncation_candidate(h, value, opts.n_theta));
        else if (kind == "cone") out.push_back(cone_candidate(value, opts.cone_rings, opts.n_theta));
        else if (kind == "translated")
            out.push_back(translated_candidate(h, value, opts.translation_delta, opts.n_theta));
        else throw std::invalid_argument("unknown family kind: " + kind);
    }
    return out;
}

MountainPassEstimate estimate_cH(const CurvatureField& f, const std::vector<Candidate>& family,
                                 std::optional<double> alpha) {
    if (family.empty()) throw std::invalid_argument("candidate family is empty");
    MountainPassEstimate est;
    est.field = f.describe();
    est.alpha = alpha;

    auto run = [&f, alpha](const Candidate& c) {
        CandidateResult r;
        r.candidate_id = c.id;
        const double D = dirichlet(c.map);
        if (!(D > 0.0)) {
            r.excluded = true;
            r.note = "degenerate map";
            return r;
        }
        const double V = volume(c.map, f);
        // f(s) ~ D s^2 + 2 V s^3 vanishes near s = D / (2 |V|).
        const double s_max = V < 0.0 ? 1.5 * D / (2.0 * -V) : 4.0;
        const RadialPathProfile p = radial_profile(c.map, f, s_max, 64, alpha);
        r.s_bar = p.s_bar;
        r.f_max = p.f_max;
        r.V_at_max = p.V_at_max;
        r.sign_changes = p.sign_changes;
        if (!p.negative_found) {
            r.excluded = true;
            r.note = p.unbounded_above ? "unbounded above on the sampled ray" : "inconclusive: no negative value found";
        } else if (!p.s_bar) {
            r.excluded = true;
            r.note = "no radial maximum";
        }
        return r;
    };

    std::vector<std::future<CandidateResult>> jobs;
    jobs.reserve(family.size());
    for (const Candidate& c : family) jobs.push_back(std::async(std::launch::async, run, std::cref(c)));
    for (auto& j : jobs) est.candidates.push_back(j.get());

    for (const auto& r : est.candidates) {
        if (r.excluded) continue;
        if (!est.c_estimate || *r.f_max < *est.c_estimate) {
            est.c_estimate = r.f_max;
            est.best_candidate = r.candidate_id;
        }
    }
    if (auto h = f.h_inf()) {
        est.upper_bound_4pi = *h == 0.0 ? std::numeric_limits<double>::infinity() : 4.0 * kPi / (3.0 * *h * *h);
    }
    est.star_condition = bounds_report(f, est).star_condition;
    return est;
}

double isoperimetric_constant() { return std::cbrt(36.0 * kPi); }

std::optional<double> constant_field_S(const CurvatureField& f) {
    const auto c = f.constant_value();
    if (!c || *c == 0.0) return std::nullopt;
    return isoperimetric_constant() / std::cbrt(*c * *c);
}

BoundsReport bounds_report(const CurvatureField& f, const MountainPassEstimate& est, double tol) {
    BoundsReport b;
    b.c_estimate = est.c_estimate;
    b.upper_bound_4pi = est.upper_bound_4pi;
    if (auto S = constant_field_S(f)) b.exact_lower = std::pow(*S / 3.0, 3.0);

    if (!b.upper_bound_4pi) {
        b.reason = "no declared far-field curvature";
        return b;
    }
    if (std::isinf(*b.upper_bound_4pi)) {
        const bool negative = std::any_of(est.candidates.begin(), est.candidates.end(),
                                          [](const CandidateResult& r) { return !r.excluded; });
        b.star_condition = negative ? StarCondition::Satisfied : StarCondition::Indeterminate;
        b.reason = negative ? "H_inf = 0 and a negative energy was found" : "H_inf = 0 but no negative energy found";
        return b;
    }
    const double bound = *b.upper_bound_4pi;
    if (b.c_estimate) b.relative_gap = (*b.c_estimate - bound) / bound;
    if (b.exact_lower && *b.exact_lower > bound * (1.0 + tol)) {
        b.star_condition = StarCondition::Violated;
        b.reason = "exact level exceeds the bound";
    } else if (f.constant_value()) {
        b.star_condition = StarCondition::Indeterminate;
        b.reason = "constant field: level equals the bound";
    } else if (b.c_estimate && *b.c_estimate < bound * (1.0 - tol)) {
        b.star_condition = StarCondition::Satisfied;
        b.reason = "family estimate below the bound beyond tolerance";
    } else {
        b.star_condition = StarCondition::Indeterminate;
        b.reason = "family estimate not below the bound beyond tolerance";
    }
    return b;
}

LambdaCheck lambda_monotonicity_check(const CurvatureField& f, const std::vector<Candidate>& family,
                                      std::vector<double> lambdas, double tol) {
    for (double l : lambdas)
        if (!(l > 0.0 && l <= 1.0)) throw std::invalid_argument("lambda must lie in (0, 1]");
    std::sort(lambdas.begin(), lambdas.end());
    LambdaCheck c;
    c.lambdas = lambdas;
    c.gate = estimate_scalars(f, 4.0, 2048).M_bar_H < 1.0;
    for (double l : lambdas) c.estimates.push_back(estimate_cH(f.scaled(l), family).c_estimate);
    for (std::size_t i = 0; i + 1 < c.estimates.size(); ++i) {
        const auto& lo = c.estimates[i];
        const auto& hi = c.estimates[i + 1];
        if (!lo || !hi) continue;
        const double v = (*hi - *lo) / *lo;
        c.worst_violation = std::max(c.worst_violation, v);
        if (v > tol) c.monotone = false;
    }
    return c;
}

TruncationCheck truncation_semicontinuity_check(const CurvatureField& f, const std::vector<Candidate>& family,
                                                const std::vector<double>& radii, double tol) {
    if (!f.h_inf()) throw FieldError("truncation check needs a declared far-field value");
    TruncationCheck c;
    c.base = estimate_cH(f, family).c_estimate;
    c.radii = radii;
    for (double r : radii) {
        const auto e = estimate_cH(truncate_field(f, r), family).c_estimate;
        c.estimates.push_back(e);
        const double d = (e && c.base) ? *e - *c.base : std::numeric_limits<double>::quiet_NaN();
        c.differences.push_back(d);
        c.exceeds.push_back(c.base && d > tol * std::abs(*c.base));
    }
    if (!c.exceeds.empty()) {
        const auto largest = std::max_element(c.radii.begin(), c.radii.end()) - c.radii.begin();
        c.limsup_ok = !c.exceeds[static_cast<std::size_t>(largest)];
    }
    return c;
}

LocalMinimumCheck local_minimum_check(const SurfaceMap& u, const CurvatureField& f, double alpha,
                                      std::optional<double> S_override, int n_scales, double tol) {
    const auto S = S_override ? S_override : constant_field_S(f);
    if (!S) throw FieldError("local minimum check needs S_H: supply it for nonconstant fields");
    LocalMinimumCheck c;
    c.rho = std::pow(*S / 2.0, 1.5);
    const double D = dirichlet(u);
    if (!(D > 0.0)) throw GeometryError("degenerate map: the Dirichlet energy vanishes");
    const double grad_l2 = std::sqrt(2.0 * D);
    const double norm = std::max(D, 1.0);
    for (int j = 0; j <= n_scales; ++j) {
        const double s = (c.rho / grad_l2) * j / n_scales;
        const SurfaceMap su = scaled(u, s);
        const double m = (energy_value(su, f, alpha) - 0.5 * s * s * D) / norm;
        c.scales.push_back(s);
        c.margins.push_back(m);
        if (m < -tol * s * s) c.passed = false;
    }
    return c;
}

}  // namespace hbubble
