#include "hbubble/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace hbubble {

const char* to_string(ChartKind kind) {
    switch (kind) {
        case ChartKind::Disk: return "disk";
        case ChartKind::Sphere: return "sphere";
        case ChartKind::Window: return "window";
    }
    return "disk";
}

namespace {

constexpr double kPi = std::numbers::pi;

int even_count(double x) {
    const int n = 2 * static_cast<int>(std::lround(x / 2.0));
    return std::max(2, n);
}

// Simpson coefficient of local ring l in a segment of `count` intervals.
double simpson_coef(int l, int count) {
    if (l == 0 || l == count) return 1.0 / 3.0;
    return (l % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
}

struct Tap {
    int offset;
    double coef;
};

// First derivative per unit index at local position l of a segment with
// `count` intervals. Fourth order: central where two neighbours exist on both
// sides (or can be mirrored through a pole), five-point one-sided otherwise.
// Two-interval segments fall back to three-point formulas.
std::vector<Tap> index_derivative(int l, int count, bool mirror_low, bool mirror_high) {
    constexpr double t = 1.0 / 12.0;
    if (count < 4) {
        if (l > 0 && l < count) return {{1, 0.5}, {-1, -0.5}};
        if (l == 0) return {{0, -1.5}, {1, 2.0}, {2, -0.5}};
        return {{0, 1.5}, {-1, -2.0}, {-2, 0.5}};
    }
    const bool central = (l >= 2 && l <= count - 2) || (l == 1 && mirror_low) || (l == count - 1 && mirror_high);
    if (central) return {{-2, t}, {-1, -8 * t}, {1, 8 * t}, {2, -t}};
    if (l == 0) return {{0, -25 * t}, {1, 48 * t}, {2, -36 * t}, {3, 16 * t}, {4, -3 * t}};
    if (l == 1) return {{-1, -3 * t}, {0, -10 * t}, {1, 18 * t}, {2, -6 * t}, {3, t}};
    if (l == count - 1) return {{1, 3 * t}, {0, 10 * t}, {-1, -18 * t}, {-2, 6 * t}, {-3, -t}};
    return {{0, 25 * t}, {-1, -48 * t}, {-2, 36 * t}, {-3, -16 * t}, {-4, 3 * t}};
}

// Fourth difference over five consecutive indices of a segment, centred on l
// when possible and shifted inward at segment ends. Empty for segments too
// short to hold five nodes.
std::vector<Tap> index_fourth_difference(int l, int count, bool mirror_low, bool mirror_high) {
    if (count < 4) return {};
    int first = -2;
    if (!mirror_low && l < 2) first = -l;
    if (!mirror_high && l > count - 2) first = count - l - 4;
    constexpr double w[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    std::vector<Tap> out;
    for (int m = 0; m < 5; ++m) out.push_back({first + m, kStabilizerScale * w[m]});
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RadialLayout

RadialLayout RadialLayout::uniform(double end, int n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("radial interval count must be even and >= 2");
    return RadialLayout({{end, n, false}});
}

RadialLayout RadialLayout::with_breaks(double end, int n, std::vector<double> breaks) {
    std::sort(breaks.begin(), breaks.end());
    std::vector<RadialSegment> segs;
    const double h = end / n;
    double a = 0.0;
    breaks.push_back(end);
    for (double b : breaks) {
        if (b <= a || b > end) continue;
        segs.push_back({b, even_count((b - a) / h), false});
        a = b;
    }
    return RadialLayout(std::move(segs));
}

RadialLayout RadialLayout::graded(double end, double core_extent, int core_count, std::vector<double> breaks,
                                  int n_outer) {
    if (core_extent <= 0.0 || core_extent >= end) throw std::invalid_argument("graded layout needs 0 < core < end");
    std::vector<RadialSegment> segs;
    segs.push_back({core_extent, even_count(core_count), false});
    const double rel = 1.0 / core_count;
    const double h_max = end / n_outer;
    const double switch_radius = h_max / rel;

    std::vector<double> cuts;
    for (double b : breaks)
        if (b > core_extent && b < end) cuts.push_back(b);
    if (switch_radius > core_extent && switch_radius < end) cuts.push_back(switch_radius);
    cuts.push_back(end);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double a = core_extent;
    for (double b : cuts) {
        if (b <= a * (1.0 + 1e-12)) continue;
        if (b <= switch_radius * (1.0 + 1e-12))
            segs.push_back({b, even_count(std::log(b / a) / std::log1p(rel)), true});
        else
            segs.push_back({b, even_count((b - a) / h_max), false});
        a = b;
    }
    return RadialLayout(std::move(segs));
}

int RadialLayout::total_intervals() const {
    int n = 0;
    for (const auto& s : segments_) n += s.count;
    return n;
}

// ---------------------------------------------------------------------------
// Grid

std::string Grid::dims() const {
    if (kind_ == ChartKind::Window) return std::to_string(n_radial_) + "x" + std::to_string(n_angular_);
    std::string d = std::to_string(n_radial_) + "x" + std::to_string(n_angular_);
    if (layout_.segments().size() > 1) d += "/" + std::to_string(layout_.segments().size()) + "seg";
    return d;
}

std::uint32_t Grid::node_index(int ring, int j) const {
    if (ring == 0) return 0;
    if (kind_ == ChartKind::Sphere && ring == n_radial_) return static_cast<std::uint32_t>(nodes_.size() - 1);
    const int jj = ((j % n_angular_) + n_angular_) % n_angular_;
    return static_cast<std::uint32_t>(1 + (ring - 1) * n_angular_ + jj);
}

bool Grid::is_split_ring(int ring) const {
    return ring >= 0 && ring < static_cast<int>(split_.size()) && split_[static_cast<std::size_t>(ring)] != 0;
}

double Grid::metric_g(double r) const { return kind_ == ChartKind::Sphere ? std::sin(r) : r; }

double Grid::radius_at(int s, double index) const {
    const auto& seg = layout_.segments()[static_cast<std::size_t>(s)];
    const double a = s == 0 ? 0.0 : layout_.segments()[static_cast<std::size_t>(s - 1)].end;
    const double t = (index - segment_start_[static_cast<std::size_t>(s)]) / seg.count;
    if (seg.geometric) return a * std::pow(seg.end / a, t);
    return a + (seg.end - a) * t;
}

double Grid::radius_rate(int s, double index) const {
    const auto& seg = layout_.segments()[static_cast<std::size_t>(s)];
    const double a = s == 0 ? 0.0 : layout_.segments()[static_cast<std::size_t>(s - 1)].end;
    if (seg.geometric) return radius_at(s, index) * std::log(seg.end / a) / seg.count;
    return (seg.end - a) / seg.count;
}

std::shared_ptr<const Grid> Grid::disk(const RadialLayout& layout, int n_theta) {
    auto g = std::make_shared<Grid>();
    g->kind_ = ChartKind::Disk;
    g->build_rings(layout, n_theta, false);
    return g;
}

std::shared_ptr<const Grid> Grid::sphere(int n_lat, int n_lon) {
    auto g = std::make_shared<Grid>();
    g->kind_ = ChartKind::Sphere;
    g->build_rings(RadialLayout::uniform(kPi, n_lat), n_lon, true);
    return g;
}

std::shared_ptr<const Grid> Grid::window(double half_width, int n) {
    auto g = std::make_shared<Grid>();
    g->kind_ = ChartKind::Window;
    g->build_window(half_width, n);
    return g;
}

void Grid::build_rings(const RadialLayout& layout, int n_angular, bool sphere) {
    if (n_angular < 8 || n_angular % 2 != 0) throw std::invalid_argument("angular node count must be even and >= 8");
    const auto& segs = layout.segments();
    if (segs.empty()) throw std::invalid_argument("empty radial layout");
    for (const auto& s : segs)
        if (s.count < 2 || s.count % 2 != 0) throw std::invalid_argument("segment interval counts must be even");
    if (segs.front().geometric) throw std::invalid_argument("the first radial segment must be linear");
    if (sphere && segs.back().geometric) throw std::invalid_argument("the last sphere segment must be linear");

    layout_ = layout;
    n_angular_ = n_angular;
    n_radial_ = layout.total_intervals();
    if (n_radial_ < 8) throw std::invalid_argument("radial resolution must be >= 8");
    const int N = n_radial_;
    const double dl = 2.0 * kPi / n_angular;

    segment_start_.clear();
    ring_r_.assign(static_cast<std::size_t>(N + 1), 0.0);
    ring_segment_.assign(static_cast<std::size_t>(N + 1), 0);
    split_.assign(static_cast<std::size_t>(N + 1), 0);
    int start = 0;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        segment_start_.push_back(start);
        for (int l = 0; l <= segs[s].count; ++l) {
            const int i = start + l;
            ring_r_[static_cast<std::size_t>(i)] = radius_at(static_cast<int>(s), i);
            if (l > 0) ring_segment_[static_cast<std::size_t>(i)] = static_cast<int>(s);
        }
        ring_r_[static_cast<std::size_t>(start + segs[s].count)] = segs[s].end;
        start += segs[s].count;
        if (s + 1 < segs.size()) split_[static_cast<std::size_t>(start)] = 1;
    }

    // Nodes.
    nodes_.clear();
    auto plane_of = [&](double r, double lam) {
        const double rho = sphere ? std::tan(0.5 * r) : r;
        return Vec2{rho * std::cos(lam), rho * std::sin(lam)};
    };
    nodes_.push_back(NodeInfo{0, 0, {0.0, 0.0}, {0.0, 0.0}, false, false});
    const int last_ring = sphere ? N - 1 : N;
    for (int i = 1; i <= last_ring; ++i)
        for (int j = 0; j < n_angular; ++j) {
            const double r = ring_r_[static_cast<std::size_t>(i)];
            const double lam = j * dl;
            NodeInfo info{i, j, {r, lam}, plane_of(r, lam), false, !sphere && i == N};
            nodes_.push_back(info);
        }
    if (sphere) {
        const double inf = std::numeric_limits<double>::infinity();
        nodes_.push_back(NodeInfo{N, 0, {kPi, 0.0}, {inf, inf}, true, false});
    }

    samples_.clear();
    stencils_.clear();

    auto conformal = [&](double r) { return sphere ? 1.0 + std::cos(r) : 1.0; };

    // Samples of ring nodes, one per adjacent segment.
    std::map<std::uint32_t, double> a_terms;
    std::map<std::uint32_t, double> b_terms;
    std::map<std::uint32_t, double> c_terms;
    std::map<std::uint32_t, double> d_terms;
    auto emit = [&](std::map<std::uint32_t, double>& terms, std::uint32_t& begin, std::uint32_t& end) {
        begin = static_cast<std::uint32_t>(stencils_.size());
        for (auto [k, c] : terms)
            if (c != 0.0) stencils_.push_back({k, c});
        end = static_cast<std::uint32_t>(stencils_.size());
        terms.clear();
    };
    auto flush = [&](std::uint32_t node, double weight, double mu) {
        Sample s{};
        s.node = node;
        s.weight = weight;
        s.conformal = mu;
        emit(a_terms, s.a_begin, s.a_end);
        emit(b_terms, s.b_begin, s.b_end);
        emit(c_terms, s.c_begin, s.c_end);
        emit(d_terms, s.d_begin, s.d_end);
        samples_.push_back(s);
    };

    for (int i = 1; i <= last_ring; ++i) {
        const double r = ring_r_[static_cast<std::size_t>(i)];
        const double g = metric_g(r);
        std::vector<int> sides;
        sides.push_back(ring_segment_[static_cast<std::size_t>(i)]);
        if (split_[static_cast<std::size_t>(i)]) sides.push_back(sides.front() + 1);

        for (int s : sides) {
            const int s0 = segment_start_[static_cast<std::size_t>(s)];
            const int count = segs[static_cast<std::size_t>(s)].count;
            const int l = i - s0;
            const double rate = radius_rate(s, i);
            // Lines through a pole are smooth, so rings beyond it are the
            // opposite half of the rings before it.
            const bool mirror_low = s == 0;
            const bool mirror_high = sphere && s == static_cast<int>(segs.size()) - 1;
            const auto taps = index_derivative(l, count, mirror_low, mirror_high);
            const auto stab = index_fourth_difference(l, count, mirror_low, mirror_high);
            for (int j = 0; j < n_angular; ++j) {
                const double lam = j * dl;
                const double c = std::cos(lam);
                const double sn = std::sin(lam);
                auto ring_node = [&](int offset) {
                    int ring = i + offset;
                    int jj = j;
                    if (ring < 0) {
                        ring = -ring;
                        jj += n_angular / 2;
                    } else if (sphere && ring > N) {
                        ring = 2 * N - ring;
                        jj += n_angular / 2;
                    }
                    return node_index(ring, jj);
                };
                for (const Tap& tap : taps) {
                    const std::uint32_t k = ring_node(tap.offset);
                    a_terms[k] += c * tap.coef / rate;
                    b_terms[k] += sn * tap.coef / rate;
                }
                for (const Tap& tap : stab) c_terms[ring_node(tap.offset)] += tap.coef / rate;
                const double ang = 1.0 / (12.0 * dl * g);
                for (auto [off, w] : {std::pair{1, 8.0}, std::pair{-1, -8.0}, std::pair{2, -1.0}, std::pair{-2, 1.0}}) {
                    const std::uint32_t k = node_index(i, j + off);
                    a_terms[k] += -sn * w * ang;
                    b_terms[k] += c * w * ang;
                }
                for (const Tap& tap : index_fourth_difference(2, 4, false, false))
                    d_terms[node_index(i, j + tap.offset)] += tap.coef / (dl * g);

                const double w = simpson_coef(l, count) * g * rate * dl;
                flush(node_index(i, j), w, conformal(r));
            }
        }
    }

    // Pole panels: exact for angle-averaged integrands 1 and R^2 on [0, R2],
    // with the pole itself weighted by the cap up to R1 / 2.
    struct PanelWeights {
        double pole, ring1, ring2;
    };
    auto panel = [&](double r1, double r2) {
        double m0, m2, cap;
        if (sphere) {
            m0 = 1.0 - std::cos(r2);
            m2 = -r2 * r2 * std::cos(r2) + 2.0 * r2 * std::sin(r2) + 2.0 * std::cos(r2) - 2.0;
            cap = 1.0 - std::cos(0.5 * r1);
        } else {
            m0 = 0.5 * r2 * r2;
            m2 = 0.25 * r2 * r2 * r2 * r2;
            cap = 0.125 * r1 * r1;
        }
        // ring1 * r1^2 + ring2 * r2^2 = m2, ring1 + ring2 = m0 - cap
        const double rest = m0 - cap;
        const double ring2 = (m2 - rest * r1 * r1) / (r2 * r2 - r1 * r1);
        return PanelWeights{cap, rest - ring2, ring2};
    };

    // Samples of a split node were emitted inner side first. Ring 2 is split
    // only when the first segment has two intervals; then the inner sample is
    // the one inside the pole panel.
    {
        const double r1 = ring_r_[1];
        const double r2 = ring_r_[2];
        const PanelWeights pw = panel(r1, r2);
        const double g2 = metric_g(r2);
        const double rate0 = radius_rate(0, 2);
        std::vector<char> seen(nodes_.size(), 0);
        for (Sample& smp : samples_) {
            const NodeInfo& info = nodes_[smp.node];
            if (info.i == 1) {
                smp.weight = pw.ring1 * dl;
            } else if (info.i == 2 && !seen[smp.node]) {
                seen[smp.node] = 1;  // inner (segment 0) sample
                smp.weight += pw.ring2 * dl - (1.0 / 3.0) * g2 * rate0 * dl;
            }
        }
        Sample pole{};
        pole.node = 0;
        pole.weight = 2.0 * kPi * pw.pole;
        pole.conformal = conformal(0.0);
        pole.a_begin = static_cast<std::uint32_t>(stencils_.size());
        for (int j = 0; j < n_angular; ++j)
            stencils_.push_back({node_index(1, j), 2.0 * std::cos(j * dl) / (n_angular * r1)});
        pole.a_end = static_cast<std::uint32_t>(stencils_.size());
        pole.b_begin = pole.a_end;
        for (int j = 0; j < n_angular; ++j)
            stencils_.push_back({node_index(1, j), 2.0 * std::sin(j * dl) / (n_angular * r1)});
        pole.b_end = static_cast<std::uint32_t>(stencils_.size());
        pole.c_begin = pole.c_end = pole.d_begin = pole.d_end = pole.b_end;
        samples_.insert(samples_.begin(), pole);
    }

    if (sphere) {
        const double t1 = kPi - ring_r_[static_cast<std::size_t>(N - 1)];
        const double t2 = kPi - ring_r_[static_cast<std::size_t>(N - 2)];
        const PanelWeights pw = panel(t1, t2);
        const int last = static_cast<int>(segs.size()) - 1;
        const double g2 = metric_g(ring_r_[static_cast<std::size_t>(N - 2)]);
        const double rate = radius_rate(last, N - 2);
        // Ring N-2 may be split only if the last segment has two intervals; the
        // outer sample (emitted second) is the one inside the last segment.
        std::vector<int> count_seen(nodes_.size(), 0);
        for (const Sample& smp : samples_)
            if (nodes_[smp.node].i == N - 2) ++count_seen[smp.node];
        std::vector<int> visit(nodes_.size(), 0);
        for (Sample& smp : samples_) {
            const NodeInfo& info = nodes_[smp.node];
            if (info.i == N - 1) {
                smp.weight = pw.ring1 * dl;
            } else if (info.i == N - 2) {
                ++visit[smp.node];
                if (visit[smp.node] == count_seen[smp.node])
                    smp.weight += pw.ring2 * dl - (1.0 / 3.0) * g2 * rate * dl;
            }
        }
        Sample pole{};
        pole.node = static_cast<std::uint32_t>(nodes_.size() - 1);
        pole.weight = 2.0 * kPi * pw.pole;
        pole.conformal = 0.0;
        pole.a_begin = static_cast<std::uint32_t>(stencils_.size());
        for (int j = 0; j < n_angular; ++j)
            stencils_.push_back({node_index(N - 1, j), 2.0 * std::cos(j * dl) / (n_angular * t1)});
        pole.a_end = static_cast<std::uint32_t>(stencils_.size());
        pole.b_begin = pole.a_end;
        for (int j = 0; j < n_angular; ++j)
            stencils_.push_back({node_index(N - 1, j), -2.0 * std::sin(j * dl) / (n_angular * t1)});
        pole.b_end = static_cast<std::uint32_t>(stencils_.size());
        pole.c_begin = pole.c_end = pole.d_begin = pole.d_end = pole.b_end;
        samples_.push_back(pole);
    }

    // Interior mask for residual reporting.
    interior_.assign(nodes_.size(), 0);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const int i = nodes_[k].i;
        if (nodes_[k].at_infinity || k == 0) continue;
        if (i < 3 || i > N - 3) continue;
        if (split_[static_cast<std::size_t>(i)]) continue;
        interior_[k] = 1;
    }

    finalize_weights(sphere ? 4.0 * kPi : kPi * layout.end() * layout.end());
}

void Grid::build_window(double half_width, int n) {
    if (n < 9 || n % 2 == 0) throw std::invalid_argument("window grids need an odd node count >= 9");
    half_width_ = half_width;
    n_radial_ = n;
    n_angular_ = n;
    const double h = 2.0 * half_width / (n - 1);
    nodes_.clear();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = -half_width + i * h;
            const double y = -half_width + j * h;
            nodes_.push_back(NodeInfo{i, j, {x, y}, {x, y}, false, false});
        }
    auto idx = [n](int i, int j) { return static_cast<std::uint32_t>(i * n + j); };
    auto coef = [n](int i) { return simpson_coef(i, n - 1); };

    samples_.clear();
    stencils_.clear();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Sample s{};
            s.node = idx(i, j);
            s.weight = coef(i) * coef(j) * h * h;
            s.conformal = 1.0;
            auto emit = [&](int t, auto at) {
                for (const Tap& tap : index_derivative(t, n - 1, false, false))
                    stencils_.push_back({at(t + tap.offset), tap.coef / h});
            };
            auto emit_stab = [&](int t, auto at) {
                for (const Tap& tap : index_fourth_difference(t, n - 1, false, false))
                    stencils_.push_back({at(t + tap.offset), tap.coef / h});
            };
            s.a_begin = static_cast<std::uint32_t>(stencils_.size());
            emit(i, [&](int t) { return idx(t, j); });
            s.a_end = static_cast<std::uint32_t>(stencils_.size());
            s.b_begin = s.a_end;
            emit(j, [&](int t) { return idx(i, t); });
            s.b_end = static_cast<std::uint32_t>(stencils_.size());
            s.c_begin = s.b_end;
            emit_stab(i, [&](int t) { return idx(t, j); });
            s.c_end = static_cast<std::uint32_t>(stencils_.size());
            s.d_begin = s.c_end;
            emit_stab(j, [&](int t) { return idx(i, t); });
            s.d_end = static_cast<std::uint32_t>(stencils_.size());
            samples_.push_back(s);
        }
    interior_.assign(nodes_.size(), 0);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const int i = nodes_[k].i;
        const int j = nodes_[k].j;
        if (i >= 2 && i <= n - 3 && j >= 2 && j <= n - 3) interior_[k] = 1;
    }
    finalize_weights(4.0 * half_width * half_width);
}

void Grid::finalize_weights(double target_area) {
    double total = 0.0;
    for (const Sample& s : samples_) total += s.weight;
    const double scale = target_area / total;
    node_weight_.assign(nodes_.size(), 0.0);
    for (Sample& s : samples_) {
        s.weight *= scale;
        node_weight_[s.node] += s.weight;
    }
    area_ = target_area;
}

std::vector<Vec3> Grid::laplacian(std::span<const Vec3> v, std::span<const double> coefficient) const {
    std::vector<Vec3> out(nodes_.size());
    auto c = [&](std::size_t k) { return coefficient.empty() ? 1.0 : coefficient[k]; };

    if (kind_ == ChartKind::Window) {
        const int n = n_radial_;
        const double h = 2.0 * half_width_ / (n - 1);
        auto idx = [n](int i, int j) { return static_cast<std::size_t>(i * n + j); };
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            if (!interior_[k]) continue;
            const int i = nodes_[k].i;
            const int j = nodes_[k].j;
            Vec3 acc;
            for (auto [p, q] : {std::pair{idx(i + 1, j), idx(i - 1, j)}, std::pair{idx(i, j + 1), idx(i, j - 1)}}) {
                const double cp = 0.5 * (c(k) + c(p));
                const double cq = 0.5 * (c(k) + c(q));
                acc += cp * (v[p] - v[k]) - cq * (v[k] - v[q]);
            }
            out[k] = acc / (h * h);
        }
        return out;
    }

    const double dl = 2.0 * kPi / n_angular_;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (!interior_[k]) continue;
        const int i = nodes_[k].i;
        const int j = nodes_[k].j;
        const int s = ring_segment_[static_cast<std::size_t>(i)];
        const double g = metric_g(ring_r_[static_cast<std::size_t>(i)]);
        const double rate = radius_rate(s, i);
        auto flux_factor = [&](double idx) { return metric_g(radius_at(s, idx)) / radius_rate(s, idx); };
        const std::size_t up = node_index(i + 1, j);
        const std::size_t dn = node_index(i - 1, j);
        const std::size_t east = node_index(i, j + 1);
        const std::size_t west = node_index(i, j - 1);
        const double cu = 0.5 * (c(k) + c(up));
        const double cd = 0.5 * (c(k) + c(dn));
        const double ce = 0.5 * (c(k) + c(east));
        const double cw = 0.5 * (c(k) + c(west));
        const Vec3 radial =
            (cu * flux_factor(i + 0.5)) * (v[up] - v[k]) - (cd * flux_factor(i - 0.5)) * (v[k] - v[dn]);
        const Vec3 angular = ce * (v[east] - v[k]) - cw * (v[k] - v[west]);
        out[k] = radial / (g * rate) + angular / (dl * dl * g * g);
    }
    return out;
}

}  // namespace hbubble
