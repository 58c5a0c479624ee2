#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hbubble/vec.hpp"

namespace hbubble {

enum class FieldKind { Constant, Radial, ConstantFarOut, Expression };

const char* to_string(FieldKind kind);

namespace detail {
struct FieldImpl;
}

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Immutable scalar field H on R^3. Copies share the underlying implementation.
class CurvatureField {
public:
    static CurvatureField constant(double h0);

    // Parses an expression (see expression.hpp for the grammar).
    static CurvatureField parse(std::string_view text, const std::map<std::string, double>& params = {},
                                std::optional<double> h_inf = std::nullopt,
                                std::optional<double> r0 = std::nullopt);

    double value(const Vec3& u) const;
    Vec3 gradient(const Vec3& u) const;
    Mat3 hessian(const Vec3& u) const;

    FieldKind kind() const;
    std::optional<double> constant_value() const;
    std::optional<double> h_inf() const;
    std::optional<double> r0() const;

    // Radii |u| across which H is only C^1 (m_H quadrature is split there).
    std::vector<double> kink_radii() const;

    // True when the expression contains constructs that are not differentiable
    // everywhere; gradients there are one-sided conventions.
    bool one_sided_gradient() const;
    const std::vector<std::string>& warnings() const;

    // Canonical text used for hashing and reports.
    std::string describe() const;
    std::uint64_t hash() const;

    CurvatureField scaled(double lambda) const;

    explicit CurvatureField(std::shared_ptr<const detail::FieldImpl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<const detail::FieldImpl> impl_;
};

// Free-function interface mirroring the operation list.
CurvatureField parse_field(std::string_view text);
double eval_field(const CurvatureField& f, const Vec3& u);
Vec3 eval_grad(const CurvatureField& f, const Vec3& u);

// m_H(u) = int_0^1 H(s u) s^2 ds by Gauss-Legendre of order k (composite over kinks).
double eval_mH(const CurvatureField& f, const Vec3& u, int k = 16);
Vec3 grad_mH(const CurvatureField& f, const Vec3& u, int k = 16);

// Value, gradient and Hessian of m_H in one pass. Used by the energy kernels.
struct MhJet {
    double m = 0.0;
    Vec3 grad;
    Mat3 hess;
};
MhJet mH_jet(const CurvatureField& f, const Vec3& u, int k, bool want_hessian);

struct FieldScalars {
    double M_H = 0.0;
    double M_bar_H = 0.0;
    double sup_H = 0.0;
    double R_sample = 0.0;
    std::size_t N_sample = 0;
    bool lower_bounds = true;  // sampled suprema never exceed the true ones
    bool h1_gate = true;       // M_H < 1 on the sample
};

FieldScalars estimate_scalars(const CurvatureField& f, double r_sample, std::size_t n_sample, int k = 16);

// Truncation: equals H on the ball of radius r_n up to O(sup_{|u|>=r_n}|H - H_inf|),
// equals H_inf beyond r_n + 1, and keeps the radial derivative damped by the cutoff.
CurvatureField truncate_field(const CurvatureField& f, double r_n);

// Smoothstep cutoff chi(t) = 1 - (3t^2 - 2t^3) on [0, 1].
double cutoff(double t);
double cutoff_derivative(double t);

struct RadialBubble {
    double rho = 0.0;
    double H = 0.0;
    double energy = 0.0;  // 4 pi / (3 H(rho)^2)
};

struct RadialBubbleReport {
    std::vector<RadialBubble> roots;
    bool degenerate = false;  // rho |H(rho)| == 1 on the whole interval
};

RadialBubbleReport radial_bubble_radii(const CurvatureField& f, double rho_min, double rho_max,
                                       std::size_t samples = 2048);

// True when sampled values agree on spheres |u| = const to `tol`.
bool is_radial(const CurvatureField& f, double r_max, double tol = 1e-12);

// Field shorthand: `const:<v>`, `radial:<expr in r>`, `expr:<string>`, `file:<path>`.
// Expressions may end in `;h_inf=<v>` and `;r0=<v>` declarations.
CurvatureField parse_field_spec(std::string_view spec);

// Field definition file with lines `expr = "..."`, `params.<name> = <v>`,
// `h_inf = <v>`, `r0 = <v>`; `#` starts a comment.
CurvatureField load_field_file(const std::string& path);
CurvatureField parse_field_definition(std::string_view text);

}  // namespace hbubble
