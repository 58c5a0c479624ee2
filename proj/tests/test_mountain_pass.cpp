#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hbubble/functionals.hpp"
#include "hbubble/mountain_pass.hpp"

using namespace hbubble;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("ray profile through the bubble of curvature 2") {
    const SurfaceMap w = make_sphere_bubble(2.0, 64, 128);
    const RadialPathProfile p = radial_profile(w, CurvatureField::constant(2.0), 2.0);
    REQUIRE(p.s_bar.has_value());
    CHECK(*p.s_bar == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(*p.f_max == doctest::Approx(kPi / 3.0).epsilon(1e-5));
    CHECK(p.sign_changes == 1);
    CHECK(p.negative_found);
    REQUIRE(p.s0.has_value());
    CHECK(*p.s0 > 1.4);  // f(s) = pi s^2 (1 - 2 s / 3) turns negative at s = 3/2
    REQUIRE(p.cubic_leading.has_value());
    CHECK(*p.cubic_leading == doctest::Approx(-2.0 * kPi / 3.0).epsilon(1e-4));
    CHECK_FALSE(p.unbounded_above);
}

TEST_CASE("ray profile without curvature never turns down") {
    const SurfaceMap w = make_sphere_bubble(1.0, 16, 32);
    const RadialPathProfile p = radial_profile(w, CurvatureField::constant(0.0), 2.0);
    CHECK_FALSE(p.s_bar.has_value());
    CHECK(p.unbounded_above);
    CHECK_FALSE(p.negative_found);
}

TEST_CASE("isoperimetric constants") {
    CHECK(isoperimetric_constant() == doctest::Approx(std::cbrt(36.0 * kPi)));
    CHECK(std::pow(*constant_field_S(CurvatureField::constant(1.0)) / 3.0, 3) == doctest::Approx(4.0 * kPi / 3.0));
    CHECK(std::pow(*constant_field_S(CurvatureField::constant(2.0)) / 3.0, 3) == doctest::Approx(kPi / 3.0));
    CHECK_FALSE(constant_field_S(CurvatureField::constant(0.0)).has_value());
    CHECK_FALSE(constant_field_S(parse_field_spec("radial:1 + exp(-r)")).has_value());
}

TEST_CASE("family parsing") {
    const auto f = CurvatureField::constant(1.0);
    FamilyOptions small;
    small.n_theta = 16;
    small.cone_rings = 16;
    const auto fam = parse_family("truncation:0.3, cone:0.5,translated:2", f, small);
    REQUIRE(fam.size() == 3);
    CHECK(fam[0].id == "truncation:0.3");
    CHECK(fam[1].id == "cone:0.5");
    CHECK(parse_family("", f, small).empty());
    CHECK(parse_family("default", f, small).size() == default_family(f, small).size());
    CHECK_THROWS_AS(parse_family("cone", f, small), std::invalid_argument);
    CHECK_THROWS_AS(parse_family("sphere:1", f, small), std::invalid_argument);
    CHECK_THROWS_AS(estimate_cH(f, {}), std::invalid_argument);
}

TEST_CASE("mountain-pass estimate for a constant field sits at the sphere level") {
    const auto f = CurvatureField::constant(2.0);
    const auto fam = parse_family("truncation:0.1,cone:0.5", f);
    const MountainPassEstimate est = estimate_cH(f, fam);
    REQUIRE(est.c_estimate.has_value());
    REQUIRE(est.upper_bound_4pi.has_value());
    CHECK(*est.upper_bound_4pi == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    CHECK(*est.c_estimate >= kPi / 3.0 * (1.0 - 1e-6));
    CHECK(*est.c_estimate <= kPi / 3.0 * 1.01);
    CHECK(est.best_candidate == "truncation:0.1");

    const BoundsReport b = bounds_report(f, est);
    REQUIRE(b.exact_lower.has_value());
    CHECK(*b.exact_lower == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    CHECK(b.relative_gap.value() < 1e-2);
}

TEST_CASE("vanishing far-field curvature gives no finite bound") {
    const auto f = parse_field_spec("expr:exp(-r);h_inf=0");
    FamilyOptions small;
    small.n_theta = 16;
    const MountainPassEstimate est = estimate_cH(f, parse_family("truncation:0.3", f, small));
    REQUIRE(est.upper_bound_4pi.has_value());
    CHECK(std::isinf(*est.upper_bound_4pi));
    CHECK(est.star_condition != StarCondition::Violated);
}

TEST_CASE("no declared far field gives no bound at all") {
    const auto f = parse_field_spec("expr:1 + exp(-r)");
    FamilyOptions small;
    small.n_theta = 16;
    const MountainPassEstimate est = estimate_cH(f, parse_family("truncation:0.3", f, small));
    CHECK_FALSE(est.upper_bound_4pi.has_value());
    CHECK(bounds_report(f, est).star_condition == StarCondition::Indeterminate);
}

TEST_CASE("small maps sit inside the well") {
    const SurfaceMap c = make_cone_map(0.5, 32, 32);
    const auto f = CurvatureField::constant(1.0);
    const LocalMinimumCheck m = local_minimum_check(c, f, 1.1);
    CHECK(m.rho == doctest::Approx(std::pow(std::cbrt(36.0 * kPi) / 2.0, 1.5)));
    CHECK(m.scales.size() == m.margins.size());
    CHECK(m.passed);
    CHECK_THROWS_AS(local_minimum_check(c, parse_field_spec("radial:1 + exp(-r)"), 1.1), FieldError);
    CHECK_NOTHROW(local_minimum_check(c, parse_field_spec("radial:1 + exp(-r)"), 1.1, 4.0));
}
