#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "hbubble/functionals.hpp"
#include "hbubble/grid.hpp"
#include "hbubble/io.hpp"
#include "hbubble/surface_map.hpp"

using namespace hbubble;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("stereographic map lands on the unit sphere") {
    for (Vec2 z : {Vec2{0, 0}, Vec2{0.3, -2.0}, Vec2{10.0, 5.0}}) CHECK(norm(stereographic(z)) == doctest::Approx(1.0));
    const Vec3 s = stereographic(Vec2{0, 0});
    CHECK(s.z == -1.0);
    CHECK(stereographic_far_field.z == 1.0);
}

TEST_CASE("chart areas") {
    CHECK(Grid::sphere(16, 32)->area() == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    CHECK(Grid::disk(16, 32)->area() == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(Grid::window(2.0, 9)->area() == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("layouts place rings exactly on breaks") {
    const auto g = Grid::disk(RadialLayout::with_breaks(1.0, 32, {0.3, 0.09}), 16);
    int hits = 0;
    for (int i = 0; i <= g->n_radial(); ++i) {
        const double R = g->ring_coordinate(i);
        if (R == 0.3 || R == 0.09) {
            ++hits;
            CHECK(g->is_split_ring(i));
        }
    }
    CHECK(hits == 2);
}

TEST_CASE("sphere bubble gradient at the origin is 2 sqrt 2") {
    const SurfaceMap w = make_sphere_bubble(1.0, 64, 128);
    const GradientField g = differentiate(w);
    const double at0 = std::sqrt(norm2(g.ux[0]) + norm2(g.uy[0]));
    CHECK(at0 == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-3));
    CHECK(gradient_sup(w).value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("the bubble is conformal on the sphere chart") {
    // the chart derivatives of a round sphere are exact up to rounding at any resolution
    for (int n : {16, 32, 64}) CHECK(conformality(make_sphere_bubble(1.0, n, 2 * n)).relative < 1e-12);
    CHECK(conformality(make_cone_map(0.4, 32, 32)).relative > 1e-2);
}

TEST_CASE("dilation leaves the Dirichlet energy unchanged") {
    const auto grid = Grid::sphere(64, 128);
    const SurfaceMap w = make_sphere_bubble(1.0, grid);
    for (double k : {0.5, 2.0, 8.0}) CHECK(dirichlet(dilate(w, k, grid)) == doctest::Approx(dirichlet(w)).epsilon(1e-3));
}

TEST_CASE("cone map pieces") {
    const SurfaceMap c = make_cone_map(0.4, 32, 32);
    const Grid& g = *c.grid;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const NodeInfo& n = g.node(k);
        const double r = n.chart.x;
        if (n.fixed) {
            CHECK(norm2(c.values[k]) == 0.0);
        } else if (r <= 0.4) {
            const Vec3 s = stereographic(n.plane);
            CHECK(norm(c.values[k] - s) < 1e-14);
        } else {
            CHECK(norm(c.values[k]) == doctest::Approx((1.0 - r) / 0.6).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(make_cone_map(1.5, 16, 16), GeometryError);
}

TEST_CASE("bubble truncation vanishes beyond delta and reproduces the bubble core") {
    const SurfaceMap w = make_sphere_bubble(1.0, 32, 64);
    const double delta = 0.3;
    const SurfaceMap t = truncate_bubble(w, delta, 32);
    const double d5 = std::pow(delta, 5);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const NodeInfo& n = t.grid->node(k);
        const double r = n.chart.x;
        if (r >= delta) CHECK(norm2(t.values[k]) == 0.0);
        if (r <= std::pow(delta, 4)) {
            const Vec3 expect = stereographic(Vec2{n.plane.x / d5, n.plane.y / d5});
            CHECK(norm(t.values[k] - expect) < 1e-12);
        }
    }
}

TEST_CASE("translation shifts values and the far field") {
    const SurfaceMap w = make_sphere_bubble(1.0, 8, 16);
    const SurfaceMap t = translate_sphere(w, 3.0);
    CHECK(t.values[5].z == doctest::Approx(w.values[5].z - 3.0));
    REQUIRE(t.far_field);
    CHECK(t.far_field->z == doctest::Approx(-2.0));
}

TEST_CASE("interpolation") {
    SUBCASE("cubic polynomials are exact on a window") {
        const auto g = Grid::window(2.0, 17);
        SurfaceMap u;
        u.grid = g;
        u.values.resize(g->node_count());
        auto p = [](const Vec2& z) { return Vec3{z.x * z.x * z.y, 1.0 - z.y * z.y * z.y, z.x + 2.0 * z.y}; };
        for (std::size_t k = 0; k < g->node_count(); ++k) u.values[k] = p(g->node(k).plane);
        for (Vec2 z : {Vec2{0.13, -0.71}, Vec2{1.9, 1.9}, Vec2{-1.234, 0.5}})
            CHECK(norm(interpolate(u, z) - p(z)) < 1e-12);
    }
    SUBCASE("ring charts reproduce their nodes") {
        const SurfaceMap c = make_cone_map(0.5, 16, 16);
        for (std::size_t k : {std::size_t{0}, std::size_t{17}, std::size_t{100}})
            CHECK(norm(interpolate(c, c.grid->node(k).plane) - c.values[k]) < 1e-12);
        CHECK(norm2(interpolate(c, Vec2{2.0, 0.0})) == 0.0);
    }
}

TEST_CASE("checkpoints round-trip bit for bit") {
    for (const SurfaceMap& u : {make_cone_map(0.3, 16, 16), make_sphere_bubble(2.0, 8, 16)}) {
        std::stringstream ss;
        write_checkpoint(ss, u, 1.0625, 0xabcdef12345ull);
        const Checkpoint c = read_checkpoint(ss);
        CHECK(c.alpha == 1.0625);
        CHECK(c.field_hash == 0xabcdef12345ull);
        CHECK(c.map.grid->dims() == u.grid->dims());
        REQUIRE(c.map.size() == u.size());
        bool same = true;
        for (std::size_t k = 0; k < u.size(); ++k)
            same = same && c.map.values[k].x == u.values[k].x && c.map.values[k].y == u.values[k].y &&
                   c.map.values[k].z == u.values[k].z;
        CHECK(same);
        CHECK(c.map.far_field.has_value() == u.far_field.has_value());
    }
    std::stringstream junk("not a checkpoint at all");
    CHECK_THROWS_AS(read_checkpoint(junk), IoError);
}

TEST_CASE("surface dumps") {
    const SurfaceMap u = make_sphere_bubble(1.0, 8, 8);
    std::ostringstream csv;
    write_csv(csv, u);
    const std::string text = csv.str();
    CHECK(text.rfind("chart,i,j,x,y,u1,u2,u3\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(u.size() + 1));
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.find("inf,inf") != std::string::npos);

    std::ostringstream obj;
    write_obj(obj, u);
    std::istringstream lines(obj.str());
    std::string line;
    long faces = 0, vertices = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("f ", 0) == 0) ++faces;
        if (line.rfind("v ", 0) == 0) ++vertices;
    }
    CHECK(vertices == static_cast<long>(u.size()));
    // 8 latitude intervals of 8 cells each, whether the pole cells are fans or quads
    CHECK(faces == 8 * 8);
}
