#include <cmath>

#include "doctest.h"
#include "hbubble/blowup.hpp"
#include "hbubble/functionals.hpp"

using namespace hbubble;

namespace {

SurfaceMap bubble_on_window(double half_width, int n, double k) {
    SurfaceMap u;
    u.grid = Grid::window(half_width, n);
    u.values.resize(u.grid->node_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec2 z = u.grid->node(i).plane;
        u.values[i] = stereographic(Vec2{k * z.x, k * z.y});
    }
    return u;
}

}  // namespace

TEST_CASE("lambda from the concentration scale") {
    for (double alpha : {1.5, 1.1, 1.01}) {
        const double eps = std::exp(-1.0 / (alpha - 1.0));
        CHECK(lambda_of(eps, alpha) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    }
    CHECK(lambda_of(0.3, 1.0) == 1.0);
}

TEST_CASE("lambda extrapolation") {
    SUBCASE("a linear approach to one is recovered exactly") {
        const std::vector<double> a{1.1, 1.05, 1.025};
        std::vector<double> l;
        for (double x : a) l.push_back(1.0 - 0.8 * (x - 1.0));
        const LambdaEstimate e = track_lambda(a, l);
        CHECK(e.estimate == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.near_one);
        CHECK_FALSE(e.degenerate);
        CHECK(e.lo <= e.estimate);
        CHECK(e.hi >= e.estimate);
        CHECK(e.raw == l);
    }
    SUBCASE("a quadratic approach too") {
        const std::vector<double> a{1.2, 1.1, 1.05};
        std::vector<double> l;
        for (double x : a) l.push_back(0.6 + 0.5 * (x - 1.0) - 3.0 * (x - 1.0) * (x - 1.0));
        const LambdaEstimate e = track_lambda(a, l);
        CHECK(e.estimate == doctest::Approx(0.6).epsilon(1e-12));
        CHECK_FALSE(e.near_one);
    }
    SUBCASE("collapse of lambda is flagged") {
        const LambdaEstimate e = track_lambda({1.1, 1.05, 1.025}, {0.1, 0.05, 0.025});
        CHECK(e.degenerate);
    }
    CHECK_THROWS(track_lambda(std::vector<double>{1.1}, std::vector<double>{0.5, 0.6}));
}

TEST_CASE("concentration point and scale of a dilated bubble") {
    const SurfaceMap u = bubble_on_window(1.0, 129, 8.0);
    const Concentration c = locate_concentration(u);
    CHECK(c.epsilon == doctest::Approx(1.0 / (16.0 * std::sqrt(2.0))).epsilon(2e-2));
    CHECK(std::hypot(c.z_star.x, c.z_star.y) < 0.05);

    const SurfaceMap u2 = bubble_on_window(1.0, 129, 16.0);
    CHECK(locate_concentration(u).epsilon / locate_concentration(u2).epsilon == doctest::Approx(2.0).epsilon(2e-2));

    CHECK_THROWS(locate_concentration(constant_map(Grid::window(1.0, 17), Vec3{1, 2, 3})));
}

TEST_CASE("rescaling undoes a dilation") {
    const SurfaceMap u = bubble_on_window(2.0, 257, 8.0);
    const RescaledWindow r = rescale(u, 1.0 / 8.0, Vec2{0.0, 0.0}, 8.0, 65);
    CHECK_FALSE(r.clipped);
    const SurfaceMap w0 = bubble_on_window(8.0, 65, 1.0);
    const double d = h1_distance(r.v, w0);
    CHECK(d < 1e-3 * std::sqrt(2.0 * dirichlet(w0)));
    CHECK(h1_distance(w0, w0) == 0.0);
}

TEST_CASE("windows reaching past the disk are clipped") {
    const SurfaceMap c = make_cone_map(0.5, 32, 32);
    CHECK(rescale(c, 0.01, Vec2{0.0, 0.0}, 8.0, 33).clipped == false);
    CHECK(rescale(c, 0.1, Vec2{0.5, 0.0}, 8.0, 33).clipped);
}

TEST_CASE("limit diagnostics of the standard bubble window") {
    const SurfaceMap w0 = bubble_on_window(8.0, 129, 1.0);
    const auto f = CurvatureField::constant(1.0);
    const LimitDiagnostics good = limit_diagnostics(w0, f, 1.0);
    CHECK(good.nonconstant);
    CHECK(good.center_gradient == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-2));
    CHECK(good.residual < 0.05);
    CHECK(good.conformality < 0.05);
    CHECK(good.passed);
    CHECK(window_identity_defect(w0, f, 1.0) < 0.05);

    const LimitDiagnostics wrong = limit_diagnostics(w0, f, 0.5);
    CHECK_FALSE(wrong.passed);
    CHECK(wrong.residual > good.residual);

    const LimitDiagnostics flat = limit_diagnostics(constant_map(Grid::window(8.0, 33), Vec3{0, 0, 1}), f, 1.0);
    CHECK_FALSE(flat.nonconstant);
    CHECK_FALSE(flat.passed);
}

TEST_CASE("synthetic family concentrates with lambda tending to one") {
    const auto f = CurvatureField::constant(1.0);
    SyntheticFamilyOptions o;
    o.rings = 128;
    o.n_theta = 64;
    const auto states = synthetic_family(f, o);
    REQUIRE(states.size() == 3);
    CHECK(states[0].alpha > states[1].alpha);
    CHECK(states[1].alpha > states[2].alpha);
    const BlowUpTrace t = build_trace(states, f, 8.0, 65);
    REQUIRE(t.records.size() == 3);
    CHECK(t.epsilon_nonincreasing);
    CHECK(t.records[0].epsilon > t.records[2].epsilon);
    REQUIRE(t.lambda.has_value());
    CHECK(t.lambda->estimate == doctest::Approx(1.0).epsilon(0.05));
    CHECK(t.h1_distances.size() == 2);
    const SemicontinuityReport s = semicontinuity_check(t, f);
    CHECK(s.tail_flagged);
    CHECK(s.lambda == t.lambda->estimate);
}
