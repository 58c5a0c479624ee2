#pragma once

// Discrete charts.
//
// Every chart is described the same way: a set of nodes carrying values, and a
// set of quadrature samples. A sample belongs to one node (whose value it
// reads), carries a weight in the chart's own area measure, and two sparse
// stencils giving the derivatives of the map along an orthonormal frame (a, b)
// of the chart metric. The plane derivatives are u_x = mu a, u_y = mu b with mu
// the conformal factor of the chart. Energies become sums over samples of
// weight * density(u, a, b), so their exact derivatives are available by
// scattering through the same stencils.
//
// Ring charts (disk and sphere) use a radial coordinate R (radius on the disk,
// colatitude from the south pole on the sphere) split into segments. Inside a
// segment the rings follow a smooth map R(i) of the ring index, either linear
// or geometric. Segment ends are "split rings": each of their nodes carries two
// samples whose radial stencils are one-sided, one per adjacent segment. Kinks
// of piecewise maps sit on split rings and do not pollute the derivatives.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hbubble/vec.hpp"

namespace hbubble {

enum class ChartKind { Disk, Sphere, Window };

const char* to_string(ChartKind kind);

struct RadialSegment {
    double end = 0.0;
    int count = 0;          // number of intervals, even and >= 2
    bool geometric = false;  // R(i) = a (b/a)^t instead of a + (b - a) t
};

class RadialLayout {
public:
    RadialLayout() = default;
    explicit RadialLayout(std::vector<RadialSegment> segments) : segments_(std::move(segments)) {}

    // n equal intervals on [0, end].
    static RadialLayout uniform(double end, int n);

    // Equal spacing close to end / n with a ring exactly on every break.
    static RadialLayout with_breaks(double end, int n, std::vector<double> breaks);

    // Rings resolving a feature of size `core` at the origin and the given breaks:
    // a uniform patch of `core_count` intervals on [0, core_extent], then
    // geometric segments whose relative spacing matches the patch, and uniform
    // spacing no coarser than end / n_outer once rings get wider than that.
    static RadialLayout graded(double end, double core_extent, int core_count, std::vector<double> breaks,
                               int n_outer);

    const std::vector<RadialSegment>& segments() const { return segments_; }
    int total_intervals() const;
    double end() const { return segments_.empty() ? 0.0 : segments_.back().end; }

private:
    std::vector<RadialSegment> segments_;
};

struct StencilTerm {
    std::uint32_t node;
    double coef;
};

// Besides the frame derivatives a and b, every sample carries two stabilizer
// stencils (scaled fourth differences along both chart directions). The
// discrete Dirichlet energy adds half their squared norms: this is O(h^6) on
// smooth maps and removes the sawtooth modes that central differences
// cannot see.
struct Sample {
    std::uint32_t node;
    double weight;     // chart measure
    double conformal;  // mu
    std::uint32_t a_begin, a_end;
    std::uint32_t b_begin, b_end;
    std::uint32_t c_begin, c_end;
    std::uint32_t d_begin, d_end;
};

// Fourth differences are scaled by this factor over the local spacing, which
// makes the penalty of a sawtooth equal to the compact-difference Dirichlet
// energy of that sawtooth.
inline constexpr double kStabilizerScale = 0.125;

struct NodeInfo {
    int i = 0;  // ring index (ring charts) or x index (window)
    int j = 0;  // angular index or y index
    Vec2 chart;  // (R, lambda) for ring charts, (x, y) for the window
    Vec2 plane;  // stereographic plane point; infinite at the north pole
    bool at_infinity = false;
    bool fixed = false;  // Dirichlet node
};

class Grid {
public:
    static std::shared_ptr<const Grid> disk(const RadialLayout& layout, int n_theta);
    static std::shared_ptr<const Grid> disk(int n_r, int n_theta) { return disk(RadialLayout::uniform(1.0, n_r), n_theta); }
    static std::shared_ptr<const Grid> sphere(int n_lat, int n_lon);
    static std::shared_ptr<const Grid> window(double half_width, int n);

    ChartKind kind() const { return kind_; }
    std::size_t node_count() const { return nodes_.size(); }
    const NodeInfo& node(std::size_t k) const { return nodes_[k]; }
    std::span<const NodeInfo> nodes() const { return nodes_; }
    std::span<const Sample> samples() const { return samples_; }
    std::span<const StencilTerm> terms(std::uint32_t begin, std::uint32_t end) const {
        return std::span<const StencilTerm>(stencils_).subspan(begin, end - begin);
    }
    std::span<const double> node_weights() const { return node_weight_; }
    double area() const { return area_; }

    // Ring charts: number of radial intervals and angular nodes. The window
    // reports its node count per side in both.
    int n_radial() const { return n_radial_; }
    int n_angular() const { return n_angular_; }
    const RadialLayout& layout() const { return layout_; }
    double half_width() const { return half_width_; }
    std::string dims() const;

    // Ring coordinate R_i and the index of the node (ring, j). Ring 0 is the
    // centre / south pole; on the sphere ring n_radial() is the north pole.
    double ring_coordinate(int ring) const { return ring_r_[static_cast<std::size_t>(ring)]; }
    std::uint32_t node_index(int ring, int j) const;
    bool is_split_ring(int ring) const;

    // Chart-metric Laplacian of a scalar-per-component field at every node,
    // with an optional node coefficient c (divergence form div(c grad v)).
    // Entries outside interior_mask() are left at zero.
    std::vector<Vec3> laplacian(std::span<const Vec3> v, std::span<const double> coefficient = {}) const;

    // Nodes at which the Laplacian stencil is fully second order: away from
    // poles, boundary and split rings by at least the margin used in reports.
    const std::vector<char>& interior_mask() const { return interior_; }

private:
    ChartKind kind_ = ChartKind::Disk;
    std::vector<NodeInfo> nodes_;
    std::vector<Sample> samples_;
    std::vector<StencilTerm> stencils_;
    std::vector<double> node_weight_;
    std::vector<char> interior_;
    double area_ = 0.0;
    int n_radial_ = 0;
    int n_angular_ = 0;
    double half_width_ = 0.0;
    RadialLayout layout_;
    std::vector<double> ring_r_;
    std::vector<int> ring_segment_;  // segment owning ring i (inner side for split rings)
    std::vector<char> split_;

    // Smooth ring map data for the flux-form Laplacian.
    double radius_at(int segment, double index) const;
    double radius_rate(int segment, double index) const;  // dR / d index
    double metric_g(double r) const;                       // r on the disk, sin r on the sphere
    std::vector<int> segment_start_;

    void build_rings(const RadialLayout& layout, int n_angular, bool sphere);
    void build_window(double half_width, int n);
    void finalize_weights(double target_area);
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace hbubble
