#pragma once

// File formats. Text output uses LF newlines and %.17g floats.
//
// Surface CSV: header `chart,i,j,x,y,u1,u2,u3`, one row per node in node
// order. (i, j) are the ring and angular indices (x and y indices on a
// window); (x, y) is the stereographic plane point, written `inf,inf` at the
// north pole of a sphere chart.
//
// OBJ: one `v` line per node, then quad faces between consecutive rings (or
// window rows) and triangle fans at the centre and poles. Indices are 1-based.
//
// Checkpoint (little-endian throughout):
//   char[8]  "HBCKPT01"
//   f64      alpha
//   u64      field hash
//   u32      chart kind (0 disk, 1 sphere, 2 window)
//   u32      angular count (window: nodes per side)
//   window:      f64 half width
//   ring charts: u32 segment count, then per segment f64 end, u32 count, u32 geometric
//   u8       far field present, then 3 x f64 (always written, zero when absent)
//   u64      node count
//   node count x 3 x f64 values

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "hbubble/surface_map.hpp"

namespace hbubble {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_csv(std::ostream& os, const SurfaceMap& u);
void write_csv(const std::string& path, const SurfaceMap& u);

void write_obj(std::ostream& os, const SurfaceMap& u);
void write_obj(const std::string& path, const SurfaceMap& u);

struct Checkpoint {
    double alpha = 1.0;
    std::uint64_t field_hash = 0;
    SurfaceMap map;  // on a freshly built grid equal to the original one
};

void write_checkpoint(std::ostream& os, const SurfaceMap& u, double alpha, std::uint64_t field_hash);
void write_checkpoint(const std::string& path, const SurfaceMap& u, double alpha, std::uint64_t field_hash);
Checkpoint read_checkpoint(std::istream& is);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace hbubble
