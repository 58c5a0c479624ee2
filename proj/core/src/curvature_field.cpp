#include "hbubble/curvature_field.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hbubble/expression.hpp"
#include "hbubble/quadrature.hpp"
#include "hbubble/util.hpp"

namespace hbubble {

const char* to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::Constant: return "constant";
        case FieldKind::Radial: return "radial";
        case FieldKind::ConstantFarOut: return "constant-far-out";
        case FieldKind::Expression: return "expression";
    }
    return "expression";
}

namespace detail {

struct FieldImpl {
    virtual ~FieldImpl() = default;
    virtual double value(const Vec3& u) const = 0;
    virtual Vec3 gradient(const Vec3& u) const = 0;
    virtual Mat3 hessian(const Vec3& u) const = 0;

    FieldKind kind = FieldKind::Expression;
    std::optional<double> constant;
    std::optional<double> h_inf;
    std::optional<double> r0;
    std::vector<double> kinks;
    std::vector<std::string> warnings;
    std::string description;
};

}  // namespace detail

namespace {

using detail::FieldImpl;

class ExpressionField final : public FieldImpl {
public:
    explicit ExpressionField(expr::ParsedExpression parsed) : parsed_(std::move(parsed)) {
        value_ = expr::Program(parsed_.root);
        std::array<expr::NodePtr, 3> d;
        for (int i = 0; i < 3; ++i) {
            d[static_cast<std::size_t>(i)] = expr::differentiate(parsed_.root, i);
            grad_[static_cast<std::size_t>(i)] = expr::Program(d[static_cast<std::size_t>(i)]);
        }
        int slot = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                hess_[static_cast<std::size_t>(slot++)] =
                    expr::Program(expr::differentiate(d[static_cast<std::size_t>(i)], j));
    }

    double value(const Vec3& u) const override { return value_(u, parsed_.param_values); }

    Vec3 gradient(const Vec3& u) const override {
        return {grad_[0](u, parsed_.param_values), grad_[1](u, parsed_.param_values),
                grad_[2](u, parsed_.param_values)};
    }

    Mat3 hessian(const Vec3& u) const override {
        Mat3 h;
        int slot = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                const double v = hess_[static_cast<std::size_t>(slot++)](u, parsed_.param_values);
                h(i, j) = v;
                h(j, i) = v;
            }
        return h;
    }

    const expr::ParsedExpression& parsed() const { return parsed_; }

private:
    expr::ParsedExpression parsed_;
    expr::Program value_;
    std::array<expr::Program, 3> grad_;
    std::array<expr::Program, 6> hess_;
};

class ScaledField final : public FieldImpl {
public:
    ScaledField(std::shared_ptr<const FieldImpl> base, double lambda) : base_(std::move(base)), lambda_(lambda) {}
    double value(const Vec3& u) const override { return lambda_ * base_->value(u); }
    Vec3 gradient(const Vec3& u) const override { return lambda_ * base_->gradient(u); }
    Mat3 hessian(const Vec3& u) const override { return lambda_ * base_->hessian(u); }

private:
    std::shared_ptr<const FieldImpl> base_;
    double lambda_;
};

// H_n = H_inf + chi(|u| - r_n) G(u) + int_{max(|u|, r_n)}^{r_n+1} chi'(t - r_n) G(t uhat) dt,
// with G = H - H_inf. Along each ray dH_n/dr = chi dG/dr, which fixes the
// integration constant so that H_n = H_inf for |u| >= r_n + 1.
class TruncatedField final : public FieldImpl {
public:
    TruncatedField(std::shared_ptr<const FieldImpl> base, double h_inf, double r_n, int order)
        : base_(std::move(base)), hinf_(h_inf), rn_(r_n), rule_(gauss_legendre01(order)) {}

    double value(const Vec3& u) const override {
        const double r = norm(u);
        if (r >= rn_ + 1.0) return hinf_;
        const Vec3 dir = direction(u, r);
        const double lo = std::max(r, rn_);
        double integral = 0.0;
        const double len = rn_ + 1.0 - lo;
        for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
            const double t = lo + len * rule_.nodes[q];
            integral += rule_.weights[q] * cutoff_derivative(t - rn_) * (base_->value(t * dir) - hinf_);
        }
        integral *= len;
        return hinf_ + cutoff(r - rn_) * (base_->value(u) - hinf_) + integral;
    }

    Vec3 gradient(const Vec3& u) const override {
        const double r = norm(u);
        if (r >= rn_ + 1.0) return {};
        Vec3 g = cutoff(r - rn_) * base_->gradient(u);
        if (r == 0.0) return g;  // tangential correction has no direction to act on
        const Vec3 dir = u / r;
        const double lo = std::max(r, rn_);
        const double len = rn_ + 1.0 - lo;
        Vec3 acc;
        for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
            const double t = lo + len * rule_.nodes[q];
            acc += (rule_.weights[q] * len * cutoff_derivative(t - rn_) * t) * base_->gradient(t * dir);
        }
        const Vec3 tangential = acc - dot(acc, dir) * dir;
        return g + tangential / r;
    }

    // Central differences of the analytic gradient; only the Newton polish uses it.
    Mat3 hessian(const Vec3& u) const override {
        Mat3 h;
        const double step = 1e-5 * std::max(1.0, norm(u));
        for (int j = 0; j < 3; ++j) {
            Vec3 up = u;
            Vec3 dn = u;
            up[j] += step;
            dn[j] -= step;
            const Vec3 col = (gradient(up) - gradient(dn)) / (2.0 * step);
            for (int i = 0; i < 3; ++i) h(i, j) = col[i];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) h(i, j) = h(j, i) = 0.5 * (h(i, j) + h(j, i));
        return h;
    }

private:
    std::shared_ptr<const FieldImpl> base_;
    double hinf_;
    double rn_;
    const GaussRule& rule_;

    // At the origin every direction is equally valid; the pole e3 is used.
    static Vec3 direction(const Vec3& u, double r) { return r > 0.0 ? u / r : Vec3{0.0, 0.0, 1.0}; }
};


void verify_far_constant(const FieldImpl& f) {
    if (!f.r0 || !f.h_inf) return;
    const double r0 = *f.r0;
    const double tol = 1e-12 * std::max(1.0, std::abs(*f.h_inf));
    for (const Vec3& p : sobol_sphere(1.0, 256)) {
        for (double scale : {1.0, 1.5, 3.0, 10.0}) {
            const Vec3 u = (std::max(r0, 1e-300) * scale) * p;
            if (std::abs(f.value(u) - *f.h_inf) > tol)
                throw FieldError("field is not constant beyond the declared r0");
        }
    }
}

}  // namespace

CurvatureField CurvatureField::constant(double h0) {
    return parse(format17(h0));
}

CurvatureField CurvatureField::parse(std::string_view text, const std::map<std::string, double>& params,
                                     std::optional<double> h_inf, std::optional<double> r0) {
    auto parsed = expr::parse(text, params);
    auto impl = std::make_shared<ExpressionField>(parsed);
    impl->warnings = parsed.warnings;
    if (!parsed.uses_u && !parsed.uses_r) {
        impl->kind = FieldKind::Constant;
        impl->constant = expr::evaluate(parsed.root, {}, parsed.param_values);
        impl->h_inf = h_inf.value_or(*impl->constant);
        impl->r0 = r0.value_or(0.0);
        if (*impl->h_inf != *impl->constant) throw FieldError("declared h_inf differs from the constant value");
    } else {
        impl->kind = r0 ? FieldKind::ConstantFarOut : (parsed.uses_u ? FieldKind::Expression : FieldKind::Radial);
        impl->h_inf = h_inf;
        impl->r0 = r0;
        if (r0 && !h_inf) throw FieldError("r0 declared without h_inf");
    }
    std::string desc = "expr(" + expr::to_string(parsed.root, parsed.param_names) + ")";
    for (std::size_t i = 0; i < parsed.param_names.size(); ++i)
        desc += ";" + parsed.param_names[i] + "=" + format17(parsed.param_values[i]);
    if (impl->h_inf) desc += ";h_inf=" + format17(*impl->h_inf);
    if (impl->r0) desc += ";r0=" + format17(*impl->r0);
    impl->description = desc;
    verify_far_constant(*impl);
    return CurvatureField(impl);
}

double CurvatureField::value(const Vec3& u) const {
    if (impl_->constant) return *impl_->constant;
    return impl_->value(u);
}
Vec3 CurvatureField::gradient(const Vec3& u) const {
    if (impl_->constant) return {};
    return impl_->gradient(u);
}
Mat3 CurvatureField::hessian(const Vec3& u) const {
    if (impl_->constant) return {};
    return impl_->hessian(u);
}

FieldKind CurvatureField::kind() const { return impl_->kind; }
std::optional<double> CurvatureField::constant_value() const { return impl_->constant; }
std::optional<double> CurvatureField::h_inf() const { return impl_->h_inf; }
std::optional<double> CurvatureField::r0() const { return impl_->r0; }
std::vector<double> CurvatureField::kink_radii() const { return impl_->kinks; }
bool CurvatureField::one_sided_gradient() const { return !impl_->warnings.empty(); }
const std::vector<std::string>& CurvatureField::warnings() const { return impl_->warnings; }
std::string CurvatureField::describe() const { return impl_->description; }
std::uint64_t CurvatureField::hash() const { return fnv1a64(impl_->description); }

CurvatureField CurvatureField::scaled(double lambda) const {
    if (lambda == 1.0) return *this;
    auto impl = std::make_shared<ScaledField>(impl_, lambda);
    impl->kind = impl_->kind;
    if (impl_->constant) impl->constant = lambda * *impl_->constant;
    if (impl_->h_inf) impl->h_inf = lambda * *impl_->h_inf;
    impl->r0 = impl_->r0;
    impl->kinks = impl_->kinks;
    impl->warnings = impl_->warnings;
    impl->description = "scale(" + format17(lambda) + "," + impl_->description + ")";
    return CurvatureField(impl);
}

CurvatureField parse_field(std::string_view text) { return CurvatureField::parse(text); }
double eval_field(const CurvatureField& f, const Vec3& u) { return f.value(u); }
Vec3 eval_grad(const CurvatureField& f, const Vec3& u) { return f.gradient(u); }

double cutoff(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

double cutoff_derivative(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return -6.0 * t * (1.0 - t);
}

namespace {

// Panel boundaries in s: kinks at |s u| = rho split the segment [0, 1].
template <class Visit>
void for_each_segment_node(const CurvatureField& f, const Vec3& u, int k, Visit&& visit) {
    const GaussRule& rule = gauss_legendre01(k);
    const double r = norm(u);
    std::array<double, 8> cuts{};
    std::size_t ncuts = 0;
    cuts[ncuts++] = 0.0;
    for (double rho : f.kink_radii())
        if (rho > 0.0 && rho < r && ncuts < cuts.size() - 1) cuts[ncuts++] = rho / r;
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(ncuts));
    cuts[ncuts++] = 1.0;
    for (std::size_t p = 0; p + 1 < ncuts; ++p) {
        const double a = cuts[p];
        const double len = cuts[p + 1] - a;
        if (len <= 0.0) continue;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) visit(a + len * rule.nodes[q], rule.weights[q] * len);
    }
}

}  // namespace

MhJet mH_jet(const CurvatureField& f, const Vec3& u, int k, bool want_hessian) {
    MhJet jet;
    if (auto c = f.constant_value()) {
        jet.m = *c / 3.0;
        return jet;
    }
    for_each_segment_node(f, u, k, [&](double s, double w) {
        const Vec3 x = s * u;
        const double s2 = s * s;
        jet.m += w * s2 * f.value(x);
        jet.grad += (w * s2 * s) * f.gradient(x);
        if (want_hessian) jet.hess += (w * s2 * s2) * f.hessian(x);
    });
    return jet;
}

double eval_mH(const CurvatureField& f, const Vec3& u, int k) {
    if (k < 2) throw std::invalid_argument("quadrature order must be at least 2");
    if (auto c = f.constant_value()) {
        // Run the rule anyway so the result reflects order k, not a shortcut.
        const GaussRule& rule = gauss_legendre01(k);
        double m = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) m += rule.weights[q] * rule.nodes[q] * rule.nodes[q];
        return *c * m;
    }
    return mH_jet(f, u, k, false).m;
}

Vec3 grad_mH(const CurvatureField& f, const Vec3& u, int k) { return mH_jet(f, u, k, false).grad; }

FieldScalars estimate_scalars(const CurvatureField& f, double r_sample, std::size_t n_sample, int k) {
    if (r_sample <= 0.0 || n_sample < 1) throw std::invalid_argument("estimate_scalars needs R > 0 and N >= 1");
    FieldScalars out;
    out.R_sample = r_sample;
    out.N_sample = n_sample;

    std::vector<Vec3> pts = sobol_ball(r_sample, n_sample);
    const auto boundary = sobol_sphere(r_sample, std::max<std::size_t>(1, n_sample / 4));
    pts.insert(pts.end(), boundary.begin(), boundary.end());

    auto radial_term = [&](const Vec3& x) { return std::abs(dot(f.gradient(x), x)) * norm(x); };

    for (const Vec3& u : pts) {
        out.sup_H = std::max(out.sup_H, std::abs(f.value(u)));
        out.M_H = std::max(out.M_H, radial_term(u));
        // The segment nodes used by m_H are sampled too, so the sampled
        // M_bar never exceeds the sampled M.
        double m = 0.0;
        for_each_segment_node(f, u, k, [&](double s, double w) {
            out.M_H = std::max(out.M_H, radial_term(s * u));
            m += w * s * s * f.value(s * u);
        });
        out.M_bar_H = std::max(out.M_bar_H, 2.0 * std::abs(f.value(u) - 3.0 * m) * norm(u));
    }
    out.h1_gate = out.M_H < 1.0;
    return out;
}

CurvatureField truncate_field(const CurvatureField& f, double r_n) {
    if (!(r_n > 0.0)) throw std::invalid_argument("truncation radius must be positive");
    if (!f.h_inf()) throw FieldError("truncation needs a declared h_inf");
    const double hinf = *f.h_inf();
    if (f.kind() == FieldKind::Constant) return f;

    // The implementation pointer is reachable only through the public handle,
    // so rebuild the base as an opaque delegate.
    struct Delegate final : FieldImpl {
        explicit Delegate(CurvatureField g) : g_(std::move(g)) {}
        double value(const Vec3& u) const override { return g_.value(u); }
        Vec3 gradient(const Vec3& u) const override { return g_.gradient(u); }
        Mat3 hessian(const Vec3& u) const override { return g_.hessian(u); }
        CurvatureField g_;
    };
    auto base = std::make_shared<Delegate>(f);
    auto impl = std::make_shared<TruncatedField>(base, hinf, r_n, 16);
    impl->kind = FieldKind::ConstantFarOut;
    impl->h_inf = hinf;
    impl->r0 = r_n + 1.0;
    impl->kinks = f.kink_radii();
    impl->kinks.push_back(r_n);
    impl->kinks.push_back(r_n + 1.0);
    std::sort(impl->kinks.begin(), impl->kinks.end());
    impl->warnings = f.warnings();
    impl->description = "truncate(" + format17(r_n) + "," + f.describe() + ")";
    return CurvatureField(impl);
}

bool is_radial(const CurvatureField& f, double r_max, double tol) {
    if (f.kind() == FieldKind::Constant || f.kind() == FieldKind::Radial) return true;
    const auto dirs = sobol_sphere(1.0, 64);
    for (int i = 1; i <= 32; ++i) {
        const double r = r_max * i / 32.0;
        const double ref = f.value(r * dirs.front());
        for (const Vec3& d : dirs)
            if (std::abs(f.value(r * d) - ref) > tol * std::max(1.0, std::abs(ref))) return false;
    }
    return true;
}

RadialBubbleReport radial_bubble_radii(const CurvatureField& f, double rho_min, double rho_max,
                                       std::size_t samples) {
    if (!(rho_min > 0.0) || !(rho_max > rho_min)) throw std::invalid_argument("search interval must be 0 < a < b");
    if (!is_radial(f, rho_max)) throw FieldError("field is not radial");
    const Vec3 e3{0.0, 0.0, 1.0};
    auto g = [&](double rho) { return rho * std::abs(f.value(rho * e3)) - 1.0; };

    RadialBubbleReport report;
    std::vector<double> grid(samples + 1);
    std::vector<double> vals(samples + 1);
    bool all_zero = true;
    for (std::size_t i = 0; i <= samples; ++i) {
        grid[i] = rho_min + (rho_max - rho_min) * static_cast<double>(i) / static_cast<double>(samples);
        vals[i] = g(grid[i]);
        if (std::abs(vals[i]) > 1e-12) all_zero = false;
    }
    if (all_zero) {
        report.degenerate = true;
        return report;
    }
    auto push = [&](double rho) {
        const double h = f.value(rho * e3);
        report.roots.push_back({rho, h, 4.0 * std::numbers::pi / (3.0 * h * h)});
    };
    for (std::size_t i = 0; i <= samples; ++i) {
        if (vals[i] == 0.0) {
            push(grid[i]);
            continue;
        }
        if (i < samples && vals[i + 1] != 0.0 && (vals[i] < 0.0) != (vals[i + 1] < 0.0)) {
            auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::abs(a); };
            auto [lo, hi] = boost::math::tools::bisect(g, grid[i], grid[i + 1], tol);
            push(0.5 * (lo + hi));
        }
    }
    return report;
}

CurvatureField parse_field_definition(std::string_view text) {
    std::optional<std::string> expression;
    std::map<std::string, double> params;
    std::optional<double> h_inf;
    std::optional<double> r0;
    for (const auto& [key, value, line] : parse_key_values(text)) {
        if (key == "expr") expression = value;
        else if (key.rfind("params.", 0) == 0) params[key.substr(7)] = parse_double(value, line);
        else if (key == "h_inf") h_inf = parse_double(value, line);
        else if (key == "r0") r0 = parse_double(value, line);
        else throw FieldError("unknown key '" + key + "' on line " + std::to_string(line));
    }
    if (!expression) throw FieldError("field definition has no expr line");
    return CurvatureField::parse(*expression, params, h_inf, r0);
}

CurvatureField load_field_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FieldError("cannot open field file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_field_definition(ss.str());
}

CurvatureField parse_field_spec(std::string_view spec) {
    auto rest = [&](std::size_t n) { return spec.substr(n); };
    if (spec.rfind("const:", 0) == 0) {
        const double v = parse_double(std::string(rest(6)), 0);
        return CurvatureField::constant(v);
    }
    if (spec.rfind("file:", 0) == 0) return load_field_file(std::string(rest(5)));

    const bool radial = spec.rfind("radial:", 0) == 0;
    if (!radial && spec.rfind("expr:", 0) != 0) throw FieldError("unknown field spec '" + std::string(spec) + "'");
    std::string_view body = rest(radial ? 7 : 5);
    // Trailing `;h_inf=<v>` and `;r0=<v>` declarations.
    std::optional<double> h_inf;
    std::optional<double> r0;
    for (std::size_t cut = body.rfind(';'); cut != std::string_view::npos; cut = body.rfind(';')) {
        const std::string decl = trim(body.substr(cut + 1));
        const std::size_t eq = decl.find('=');
        if (eq == std::string::npos) throw FieldError("bad declaration '" + decl + "' in field spec");
        const std::string key = trim(decl.substr(0, eq));
        const double v = parse_double(decl.substr(eq + 1), 0);
        if (key == "h_inf")
            h_inf = v;
        else if (key == "r0")
            r0 = v;
        else
            throw FieldError("unknown declaration '" + key + "' in field spec");
        body = body.substr(0, cut);
    }
    auto f = CurvatureField::parse(body, {}, h_inf, r0);
    if (radial && f.kind() != FieldKind::Radial && f.kind() != FieldKind::Constant &&
        f.kind() != FieldKind::ConstantFarOut)
        throw FieldError("radial field may only use r");
    return f;
}

}  // namespace hbubble
