#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hbubble/curvature_field.hpp"
#include "hbubble/expression.hpp"

using namespace hbubble;

namespace {

// int_0^1 s^2 exp(-a s) ds
double exp_moment(double a) { return (2.0 - std::exp(-a) * (a * a + 2.0 * a + 2.0)) / (a * a * a); }

}  // namespace

TEST_CASE("constant field has m_H = H / 3 and no gradient") {
    const auto f = CurvatureField::constant(2.5);
    const Vec3 u{0.3, -1.2, 4.0};
    CHECK(f.kind() == FieldKind::Constant);
    CHECK(f.value(u) == 2.5);
    CHECK(norm2(f.gradient(u)) == 0.0);
    CHECK(eval_mH(f, u) == doctest::Approx(2.5 / 3.0).epsilon(1e-15));
    CHECK(norm2(grad_mH(f, u)) < 1e-28);
}

TEST_CASE("m_H of a radial field matches the closed-form moment") {
    const auto f = parse_field_spec("radial:1 + exp(-r)");
    for (double r : {0.1, 1.0, 3.0, 7.5}) {
        const Vec3 u{r / std::sqrt(3.0), r / std::sqrt(3.0), -r / std::sqrt(3.0)};
        CHECK(eval_mH(f, u) == doctest::Approx(1.0 / 3.0 + exp_moment(r)).epsilon(1e-13));
    }
}

TEST_CASE("expression gradients and Hessians agree with central differences") {
    const auto f = CurvatureField::parse("1 + 0.3 * sin(u1) * cos(u2) + 0.2 * u3 * tanh(r)");
    const Vec3 u{0.4, -0.7, 1.1};
    const double h = 1e-6;
    const Vec3 g = f.gradient(u);
    const Mat3 H = f.hessian(u);
    for (int i = 0; i < 3; ++i) {
        Vec3 e{};
        e[i] = h;
        CHECK(g[i] == doctest::Approx((f.value(u + e) - f.value(u - e)) / (2 * h)).epsilon(1e-8));
        const Vec3 dg = (f.gradient(u + e) - f.gradient(u - e)) / (2 * h);
        for (int j = 0; j < 3; ++j) CHECK(H(j, i) == doctest::Approx(dg[j]).epsilon(1e-6));
    }
}

TEST_CASE("grad m_H agrees with central differences") {
    const auto f = CurvatureField::parse("1 + 0.5 * exp(-r^2) + 0.1 * u1");
    const Vec3 u{0.5, 0.2, -0.9};
    const Vec3 g = grad_mH(f, u);
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
        Vec3 e{};
        e[i] = h;
        CHECK(g[i] == doctest::Approx((eval_mH(f, u + e) - eval_mH(f, u - e)) / (2 * h)).epsilon(1e-8));
    }
}

TEST_CASE("field shorthand") {
    CHECK(parse_field_spec("const:2").constant_value() == 2.0);
    const auto decay = parse_field_spec("expr:1 + exp(-r);h_inf=1");
    REQUIRE(decay.h_inf());
    CHECK(*decay.h_inf() == 1.0);
    CHECK_THROWS_AS(parse_field_spec("bogus:1"), FieldError);
    CHECK_THROWS_AS(parse_field_spec("radial:u1 + 1"), FieldError);
    CHECK_THROWS_AS(parse_field_spec("expr:1 + exp(-r);speed=3"), FieldError);
    CHECK_THROWS_AS(CurvatureField::parse("1 + * 2"), expr::ParseError);
}

TEST_CASE("descriptions and hashes identify fields") {
    const auto a = CurvatureField::parse("1 + exp(-r)");
    const auto b = CurvatureField::parse("1+exp(-r)");
    const auto c = CurvatureField::parse("1 + exp(-2*r)");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.scaled(0.5).value(Vec3{1, 0, 0}) == doctest::Approx(0.5 * a.value(Vec3{1, 0, 0})));
}

TEST_CASE("cutoff is a smoothstep from 1 to 0") {
    CHECK(cutoff(0.0) == 1.0);
    CHECK(cutoff(1.0) == 0.0);
    CHECK(cutoff(0.5) == doctest::Approx(0.5));
    CHECK(cutoff_derivative(0.0) == 0.0);
    CHECK(cutoff_derivative(1.0) == 0.0);
    CHECK(cutoff_derivative(0.5) == doctest::Approx(-1.5));
}

TEST_CASE("truncated fields equal H_inf far out and stay close inside") {
    const auto f = parse_field_spec("expr:1 + exp(-r);h_inf=1");
    for (double rn : {5.0, 10.0}) {
        const auto fn = truncate_field(f, rn);
        CHECK(fn.value(Vec3{0, 0, rn + 1.0}) == 1.0);
        CHECK(fn.value(Vec3{rn + 2.0, 0, 0}) == 1.0);
        for (double r : {0.0, rn / 2, rn, rn + 0.5})
            CHECK(std::abs(fn.value(Vec3{r, 0, 0}) - f.value(Vec3{r, 0, 0})) <= 4.0 * std::exp(-rn));
    }
    CHECK_THROWS_AS(truncate_field(CurvatureField::parse("1 + exp(-r)"), 5.0), FieldError);
}

TEST_CASE("sampled structure scalars of simple fields") {
    const auto c = estimate_scalars(CurvatureField::constant(1.0), 8.0, 500);
    CHECK(c.M_H == 0.0);
    CHECK(c.M_bar_H == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c.h1_gate);
    const auto d = estimate_scalars(parse_field_spec("expr:1 + exp(-r);h_inf=1"), 8.0, 500);
    CHECK(d.M_H > 0.0);
    // a sampled supremum: between H_inf and H(0), and closer to H(0) with more points
    CHECK(d.sup_H > 1.0);
    CHECK(d.sup_H <= 2.0);
    CHECK(d.lower_bounds);
    CHECK(estimate_scalars(parse_field_spec("expr:1 + exp(-r);h_inf=1"), 8.0, 20000).sup_H > d.sup_H);
}

TEST_CASE("radial bubbles solve rho |H(rho)| = 1") {
    const auto two = radial_bubble_radii(CurvatureField::constant(2.0), 0.01, 5.0);
    REQUIRE(two.roots.size() == 1);
    CHECK(two.roots[0].rho == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(two.roots[0].energy == doctest::Approx(std::numbers::pi / 3.0).epsilon(1e-12));

    const auto none = radial_bubble_radii(CurvatureField::constant(0.1), 0.01, 5.0);
    CHECK(none.roots.empty());

    const auto flat = radial_bubble_radii(CurvatureField::parse("1 / r"), 0.5, 2.0);
    CHECK(flat.degenerate);
}

TEST_CASE("is_radial distinguishes radial from directional fields") {
    CHECK(is_radial(CurvatureField::parse("exp(-r^2)"), 3.0));
    CHECK_FALSE(is_radial(CurvatureField::parse("1 + 0.1 * u1"), 3.0));
}
