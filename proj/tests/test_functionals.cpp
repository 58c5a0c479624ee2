#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "doctest.h"
#include "hbubble/functionals.hpp"
#include "hbubble/surface_map.hpp"

using namespace hbubble;

namespace {

constexpr double kPi = std::numbers::pi;

SurfaceMap nudge(SurfaceMap u, std::size_t node, int comp, double t) {
    u.values[node][comp] += t;
    return u;
}

// A free node in the middle of the cone region.
std::size_t interior_node(const SurfaceMap& u) {
    const Grid& g = *u.grid;
    return g.node_index(g.n_radial() / 3, 3);
}

}  // namespace

TEST_CASE("energies of the bubble of curvature 2") {
    const SurfaceMap w = make_sphere_bubble(2.0, 64, 128);
    const auto f = CurvatureField::constant(2.0);
    const EnergyBreakdown e = energy(w, f);
    CHECK(e.D == doctest::Approx(kPi).epsilon(1e-6));
    CHECK(e.V_H == doctest::Approx(-kPi / 3.0).epsilon(1e-6));
    CHECK(e.E_H == doctest::Approx(kPi / 3.0).epsilon(1e-6));
    CHECK(e.defect_energy_identity < 1e-5);
    CHECK(e.residual_hsystem < 5e-3);
    CHECK(energy(make_sphere_bubble(2.0, 32, 64), f).residual_hsystem > 3.0 * e.residual_hsystem);
    CHECK_FALSE(e.D_alpha.has_value());
}

TEST_CASE("scaling the bubble follows D s^2 + 2 V s^3") {
    const SurfaceMap w = make_sphere_bubble(1.0, 32, 64);
    const auto f = CurvatureField::constant(1.0);
    const double D = dirichlet(w);
    const double V = volume(w, f);
    for (double s : {0.01, 0.1, 0.7, 1.3}) {
        const SurfaceMap ws = scaled(w, s);
        CHECK(dirichlet(ws) == doctest::Approx(s * s * D).epsilon(1e-12));
        CHECK(energy_value(ws, f) == doctest::Approx(s * s * D + 2.0 * s * s * s * V).epsilon(1e-12));
    }
}

TEST_CASE("volume is linear in a constant curvature") {
    const SurfaceMap c = make_cone_map(0.4, 32, 32);
    const double v1 = volume(c, CurvatureField::constant(1.0));
    CHECK(v1 != 0.0);
    for (double h : {-2.0, 0.5, 3.0}) CHECK(volume(c, CurvatureField::constant(h)) == doctest::Approx(h * v1).epsilon(1e-13));
    CHECK(volume(c, CurvatureField::constant(0.0)) == 0.0);
}

TEST_CASE("the regularized Dirichlet energy dominates the plain one") {
    const SurfaceMap c = make_cone_map(0.3, 32, 32);
    const double D = dirichlet(c);
    double previous = D;
    for (double a : {1.01, 1.1, 1.5, 1.9}) {
        const double Da = dirichlet_alpha(c, a);
        CHECK(Da >= D);
        CHECK(Da >= previous);
        previous = Da;
    }
    CHECK(dirichlet_alpha(c, 1.0) == doctest::Approx(D).epsilon(1e-14));
    const auto f = CurvatureField::constant(1.0);
    CHECK_THROWS_AS(alpha_energy(c, f, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(alpha_energy(c, f, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(energy_value(c, f, 2.5), std::invalid_argument);
    CHECK(*alpha_energy(c, f, 1.2).E_alpha == doctest::Approx(energy_value(c, f, 1.2)).epsilon(1e-13));
}

TEST_CASE("the analytic gradient matches finite differences of the energy") {
    const SurfaceMap c = make_cone_map(0.4, 16, 16);
    const auto f = parse_field_spec("expr:1 + 0.3 * exp(-r^2)");
    const std::size_t k = interior_node(c);
    for (double alpha : {1.0, 1.3}) {
        const auto grad = energy_gradient(c, f, alpha);
        for (int comp = 0; comp < 3; ++comp) {
            const double t = 1e-6;
            const double fd =
                (energy_value(nudge(c, k, comp, t), f, alpha) - energy_value(nudge(c, k, comp, -t), f, alpha)) / (2 * t);
            CHECK(grad[k][comp] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("first variation in a direction agrees with the gradient") {
    const SurfaceMap c = make_cone_map(0.4, 16, 16);
    const auto f = CurvatureField::constant(1.0);
    SurfaceMap h = c;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const NodeInfo& n = h.grid->node(k);
        h.values[k] = n.fixed ? Vec3{} : Vec3{std::sin(3.0 * n.plane.x), n.plane.y * n.plane.y, 0.5};
    }
    const auto grad = energy_gradient(c, f, 1.2);
    double pairing = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) pairing += dot(grad[k], h.values[k]);
    CHECK(alpha_first_variation(c, f, h, 1.2) == doctest::Approx(pairing).epsilon(1e-10));
    CHECK(first_variation_formula(c, f, h, 1.2) == doctest::Approx(pairing).epsilon(1e-3));
}

TEST_CASE("Hessian is symmetric and differentiates the gradient") {
    const SurfaceMap c = make_cone_map(0.4, 16, 16);
    const auto f = parse_field_spec("expr:1 + 0.3 * exp(-r^2)");
    const double alpha = 1.2;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> H;
    for (const HessianEntry& e : energy_hessian(c, f, alpha)) H[{e.row, e.col}] += e.value;
    REQUIRE_FALSE(H.empty());

    double worst = 0.0, scale = 0.0;
    for (const auto& [rc, v] : H) {
        const auto it = H.find({rc.second, rc.first});
        const double other = it == H.end() ? 0.0 : it->second;
        worst = std::max(worst, std::abs(v - other));
        scale = std::max(scale, std::abs(v));
    }
    CHECK(worst <= 1e-10 * scale);

    const std::size_t k = interior_node(c);
    for (int comp = 0; comp < 3; ++comp) {
        const double t = 1e-6;
        const auto gp = energy_gradient(nudge(c, k, comp, t), f, alpha);
        const auto gm = energy_gradient(nudge(c, k, comp, -t), f, alpha);
        const auto col = static_cast<std::uint32_t>(3 * k + comp);
        for (std::size_t l = 0; l < gp.size(); ++l)
            for (int i = 0; i < 3; ++i) {
                const double fd = (gp[l][i] - gm[l][i]) / (2 * t);
                const auto it = H.find({static_cast<std::uint32_t>(3 * l + i), col});
                const double an = it == H.end() ? 0.0 : it->second;
                CHECK(an == doctest::Approx(fd).epsilon(1e-5).scale(scale));
            }
    }
}

TEST_CASE("gradient representer vanishes on fixed nodes") {
    const SurfaceMap c = make_cone_map(0.4, 16, 16);
    const SurfaceMap g = gradient_map(c, CurvatureField::constant(1.0), 1.1);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (c.grid->node(k).fixed) CHECK(norm2(g.values[k]) == 0.0);
    CHECK(l2_norm(g) > 0.0);
}

TEST_CASE("H-system residual detects the wrong curvature") {
    const SurfaceMap w = make_sphere_bubble(1.0, 64, 128);
    const auto f = CurvatureField::constant(1.0);
    CHECK(hsystem_residual(w, f).relative < 1e-3);
    CHECK(hsystem_residual(w, f, 0.5).relative > 0.3);
    CHECK(energy_identity_defect(w, f) < 1e-5);
    CHECK(energy_identity_defect(w, f, 0.5) > 0.1);
}

TEST_CASE("isoperimetric ratio of a round sphere") {
    const SurfaceMap w = make_sphere_bubble(1.0, 64, 128);
    // D / |V|^(2/3) with D = 4 pi and |V| = 4 pi / 3
    const double expect = 4.0 * kPi / std::pow(4.0 * kPi / 3.0, 2.0 / 3.0);
    REQUIRE(isoperimetric_ratio(w, CurvatureField::constant(1.0)).has_value());
    CHECK(*isoperimetric_ratio(w, CurvatureField::constant(1.0)) == doctest::Approx(expect).epsilon(1e-6));
    CHECK_FALSE(isoperimetric_ratio(w, CurvatureField::constant(0.0)).has_value());
}
