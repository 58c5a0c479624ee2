#include "hbubble/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <ostream>
#include <istream>

#include "hbubble/util.hpp"

namespace hbubble {

namespace {

constexpr char kMagic[8] = {'H', 'B', 'C', 'K', 'P', 'T', '0', '1'};

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw IoError("cannot open " + path + " for writing");
    return os;
}

template <class T>
void put_le(std::ostream& os, T v) {
    std::array<unsigned char, sizeof(T)> b{};
    for (std::size_t k = 0; k < sizeof(T); ++k) b[k] = static_cast<unsigned char>((v >> (8 * k)) & 0xffu);
    os.write(reinterpret_cast<const char*>(b.data()), b.size());
}

void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

template <class T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw IoError("truncated checkpoint");
    T v = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k) v |= static_cast<T>(b[k]) << (8 * k);
    return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

std::uint32_t chart_code(ChartKind k) {
    switch (k) {
        case ChartKind::Disk: return 0;
        case ChartKind::Sphere: return 1;
        case ChartKind::Window: return 2;
    }
    return 0;
}

}  // namespace

void write_csv(std::ostream& os, const SurfaceMap& u) {
    const Grid& g = *u.grid;
    os << "chart,i,j,x,y,u1,u2,u3\n";
    const char* chart = to_string(g.kind());
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const NodeInfo& n = g.node(k);
        const Vec3& v = u.values[k];
        os << chart << ',' << n.i << ',' << n.j << ',';
        if (n.at_infinity)
            os << "inf,inf";
        else
            os << format17(n.plane.x) << ',' << format17(n.plane.y);
        os << ',' << format17(v.x) << ',' << format17(v.y) << ',' << format17(v.z) << '\n';
    }
}

void write_csv(const std::string& path, const SurfaceMap& u) {
    auto os = open_out(path, true);
    write_csv(os, u);
}

void write_obj(std::ostream& os, const SurfaceMap& u) {
    const Grid& g = *u.grid;
    for (const Vec3& v : u.values) os << "v " << format17(v.x) << ' ' << format17(v.y) << ' ' << format17(v.z) << '\n';
    auto face = [&os](std::initializer_list<std::uint32_t> idx) {
        os << 'f';
        for (std::uint32_t k : idx) os << ' ' << k + 1;
        os << '\n';
    };
    if (g.kind() == ChartKind::Window) {
        const auto n = static_cast<std::uint32_t>(g.n_radial());
        for (std::uint32_t i = 0; i + 1 < n; ++i)
            for (std::uint32_t j = 0; j + 1 < n; ++j)
                face({i * n + j, (i + 1) * n + j, (i + 1) * n + j + 1, i * n + j + 1});
        return;
    }
    const int m = g.n_angular();
    const int top = g.n_radial();  // boundary ring on the disk, north pole on the sphere
    const bool sphere = g.kind() == ChartKind::Sphere;
    for (int j = 0; j < m; ++j) face({g.node_index(0, 0), g.node_index(1, j), g.node_index(1, j + 1)});
    const int last_ring = sphere ? top - 1 : top;
    for (int i = 1; i < last_ring; ++i)
        for (int j = 0; j < m; ++j)
            face({g.node_index(i, j), g.node_index(i + 1, j), g.node_index(i + 1, j + 1), g.node_index(i, j + 1)});
    if (sphere)
        for (int j = 0; j < m; ++j)
            face({g.node_index(top - 1, j + 1), g.node_index(top - 1, j), g.node_index(top, 0)});
}

void write_obj(const std::string& path, const SurfaceMap& u) {
    auto os = open_out(path, true);
    write_obj(os, u);
}

void write_checkpoint(std::ostream& os, const SurfaceMap& u, double alpha, std::uint64_t field_hash) {
    const Grid& g = *u.grid;
    os.write(kMagic, sizeof kMagic);
    put_f64(os, alpha);
    put_le<std::uint64_t>(os, field_hash);
    put_le<std::uint32_t>(os, chart_code(g.kind()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.n_angular()));
    if (g.kind() == ChartKind::Window) {
        put_f64(os, g.half_width());
    } else {
        const auto& segs = g.layout().segments();
        put_le<std::uint32_t>(os, static_cast<std::uint32_t>(segs.size()));
        for (const RadialSegment& s : segs) {
            put_f64(os, s.end);
            put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.count));
            put_le<std::uint32_t>(os, s.geometric ? 1u : 0u);
        }
    }
    const Vec3 far = u.far_field.value_or(Vec3{});
    put_le<std::uint8_t>(os, u.far_field ? 1 : 0);
    put_f64(os, far.x);
    put_f64(os, far.y);
    put_f64(os, far.z);
    put_le<std::uint64_t>(os, u.values.size());
    for (const Vec3& v : u.values) {
        put_f64(os, v.x);
        put_f64(os, v.y);
        put_f64(os, v.z);
    }
    if (!os) throw IoError("checkpoint write failed");
}

void write_checkpoint(const std::string& path, const SurfaceMap& u, double alpha, std::uint64_t field_hash) {
    auto os = open_out(path, true);
    write_checkpoint(os, u, alpha, field_hash);
}

Checkpoint read_checkpoint(std::istream& is) {
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw IoError("not a checkpoint file");
    Checkpoint c;
    c.alpha = get_f64(is);
    c.field_hash = get_le<std::uint64_t>(is);
    const auto chart = get_le<std::uint32_t>(is);
    const auto n_angular = static_cast<int>(get_le<std::uint32_t>(is));
    GridPtr grid;
    if (chart == 2) {
        const double hw = get_f64(is);
        grid = Grid::window(hw, n_angular);
    } else if (chart <= 1) {
        const auto n_seg = get_le<std::uint32_t>(is);
        if (n_seg == 0 || n_seg > 4096) throw IoError("bad segment count in checkpoint");
        std::vector<RadialSegment> segs(n_seg);
        for (auto& s : segs) {
            s.end = get_f64(is);
            s.count = static_cast<int>(get_le<std::uint32_t>(is));
            s.geometric = get_le<std::uint32_t>(is) != 0;
        }
        if (chart == 0) {
            grid = Grid::disk(RadialLayout(std::move(segs)), n_angular);
        } else {
            if (n_seg != 1) throw IoError("sphere checkpoints carry one uniform segment");
            grid = Grid::sphere(segs[0].count, n_angular);
        }
    } else {
        throw IoError("unknown chart kind in checkpoint");
    }
    const bool has_far = get_le<std::uint8_t>(is) != 0;
    Vec3 far;
    far.x = get_f64(is);
    far.y = get_f64(is);
    far.z = get_f64(is);
    const auto count = get_le<std::uint64_t>(is);
    if (count != grid->node_count()) throw IoError("checkpoint node count does not match its grid");
    c.map.grid = grid;
    c.map.values.resize(count);
    for (Vec3& v : c.map.values) {
        v.x = get_f64(is);
        v.y = get_f64(is);
        v.z = get_f64(is);
    }
    if (has_far) c.map.far_field = far;
    return c;
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    return read_checkpoint(is);
}

}  // namespace hbubble
