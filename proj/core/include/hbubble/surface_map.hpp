#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hbubble/grid.hpp"
#include "hbubble/vec.hpp"

namespace hbubble {

// A closed-form map of the plane, kept alongside sampled maps so that
// constructions built on top of it (dilations, truncations) can resample it
// exactly instead of interpolating.
struct AnalyticMap {
    std::function<Vec3(const Vec2&)> fn;
    std::optional<Vec3> far_field;
    std::string description;
};

struct SurfaceMap {
    GridPtr grid;
    std::vector<Vec3> values;
    std::optional<Vec3> far_field;              // sphere chart only
    std::shared_ptr<const AnalyticMap> source;  // optional

    std::size_t size() const { return values.size(); }
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Arithmetic on maps sharing a grid.
SurfaceMap scaled(const SurfaceMap& u, double s);
SurfaceMap axpy(const SurfaceMap& u, double s, const SurfaceMap& h);  // u + s h
SurfaceMap constant_map(const GridPtr& grid, const Vec3& c);
double sup_norm(const SurfaceMap& u);

// phi(z) = (mu x, mu y, 1 - mu), mu = 2 / (1 + |z|^2); the limit at infinity is e3.
Vec3 stereographic(const Vec2& z);
inline constexpr Vec3 stereographic_far_field{0.0, 0.0, 1.0};

SurfaceMap sample_analytic(const AnalyticMap& map, const GridPtr& grid);

SurfaceMap make_sphere_bubble(double h0, int n_lat, int n_lon);
SurfaceMap make_sphere_bubble(double h0, const GridPtr& sphere_grid);

// Shifts values and far field by -r e3.
SurfaceMap translate_sphere(const SurfaceMap& omega0, double r);

// Two-piece cone map on the disk with a split ring at |z| = delta.
SurfaceMap make_cone_map(double delta, int n_r, int n_theta);
double cone_half_angle(double delta);

// Four-piece truncation of a sphere-chart map: 0 beyond delta, logarithmic
// transitions through the far field on [delta^2, delta) and [delta^4, delta^2),
// and omega(z / delta^5) inside delta^4.
SurfaceMap truncate_bubble(const SurfaceMap& omega, double delta, const GridPtr& disk_grid);
SurfaceMap truncate_bubble(const SurfaceMap& omega, double delta, int n_theta = 64);
RadialLayout truncation_layout(double delta, int core_count = 32, int n_outer = 64);
Vec3 truncated_value(const std::function<Vec3(const Vec2&)>& omega, const Vec3& far, double delta, double r,
                     double lam);

// Dilation z -> omega(k z) of an analytic source, resampled on a sphere grid.
SurfaceMap dilate(const SurfaceMap& omega, double k, const GridPtr& grid);

struct GradientField {
    std::vector<Vec3> ux;
    std::vector<Vec3> uy;
    std::vector<double> weight;
};

// Plane partials per node (the first sample of each node supplies them).
GradientField differentiate(const SurfaceMap& u);

// Value of a map at a plane point by cubic Lagrange interpolation: in the ring
// coordinate and the angle on ring charts, tensor-product on the window.
// Outside the disk the Dirichlet extension 0 is returned; outside a window the
// edge polynomials are extrapolated.
Vec3 interpolate(const SurfaceMap& u, const Vec2& z);

}  // namespace hbubble
