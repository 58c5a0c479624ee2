#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hbubble/alpha_solver.hpp"
#include "hbubble/functionals.hpp"
#include "hbubble/mountain_pass.hpp"

using namespace hbubble;

TEST_CASE("dyadic schedule") {
    const auto a = dyadic_schedule(4);
    REQUIRE(a.size() == 4);
    CHECK(a[0] == 1.5);
    CHECK(a[3] == 1.0625);
    CHECK(dyadic_schedule(0).empty());
}

TEST_CASE("H1 lower bound for the unit field") {
    const double S = std::cbrt(36.0 * std::numbers::pi);
    CHECK(h1_lower_bound(0.0, S) == doctest::Approx(8.0 * std::numbers::pi));
    CHECK(h1_lower_bound(0.5, S) < h1_lower_bound(0.0, S));
}

TEST_CASE("continuation rejects bad schedules") {
    const auto f = CurvatureField::constant(1.0);
    const SurfaceMap init = make_cone_map(0.5, 8, 8);
    CHECK_THROWS_AS(continuation(f, {}, init), std::invalid_argument);
    CHECK_THROWS_AS(continuation(f, {1.1, 1.2}, init), std::invalid_argument);
    CHECK_THROWS_AS(continuation(f, {2.1}, init), std::invalid_argument);
}

TEST_CASE("a coarse solve converges, repeats exactly and satisfies the bounds") {
    const auto f = CurvatureField::constant(1.0);
    const SurfaceMap init = make_cone_map(0.5, 16, 16);
    SolverOptions so;
    so.seed = 7;
    so.perturbation = 1e-3;
    const AlphaSolveState a = solve_alpha(f, 1.1, init, so);
    const AlphaSolveState b = solve_alpha(f, 1.1, init, so);
    REQUIRE(a.converged);
    CHECK(a.status == SolveStatus::Converged);
    CHECK(a.grad_norm <= so.tol);
    CHECK(a.energy == b.energy);
    CHECK(a.iterations == b.iterations);
    bool same = true;
    for (std::size_t k = 0; k < a.u.size(); ++k) same = same && norm2(a.u.values[k] - b.u.values[k]) == 0.0;
    CHECK(same);

    CHECK(a.energy == doctest::Approx(energy_value(a.u, f, 1.1)).epsilon(1e-12));
    CHECK(a.grad_l2 == doctest::Approx(std::sqrt(2.0 * dirichlet(a.u))).epsilon(1e-12));
    const H1BoundsReport h1 = verify_h1_bounds(a, f);
    CHECK(h1.passed());
    CHECK(h1.lower_margin > 0.0);

    const LinftyReport li = verify_linfty_bound(a, f);
    CHECK(li.sup_norm == doctest::Approx(a.sup_norm));
    CHECK(li.holds);
}

TEST_CASE("a tiny initial map collapses onto the trivial solution") {
    const auto f = CurvatureField::constant(1.0);
    const AlphaSolveState c = solve_alpha(f, 1.1, scaled(make_cone_map(0.5, 16, 16), 0.01));
    CHECK(c.status == SolveStatus::Collapsed);
    CHECK_FALSE(c.converged);
    CHECK_FALSE(c.message.empty());
}

TEST_CASE("an iteration cap reports failure") {
    const auto f = CurvatureField::constant(1.0);
    SolverOptions so;
    so.max_iter = 2;
    so.newton = false;
    int calls = 0;
    so.trace = [&calls](const IterationRecord&) { ++calls; };
    const AlphaSolveState s = solve_alpha(f, 1.1, make_cone_map(0.5, 16, 16), so);
    CHECK(s.status == SolveStatus::NotConverged);
    CHECK(s.iterations <= 2);
    CHECK(calls > 0);
}
