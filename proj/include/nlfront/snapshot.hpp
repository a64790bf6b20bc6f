#pragma once

#include <string>

#include "nlfront/pde.hpp"

namespace nlfront {

/// Binary field snapshot: a 64-byte little-endian header followed by
/// `count` float64 values.
///
///   offset  size  field
///        0     8  magic "NLFSNAP1"
///        8     4  version (uint32, = 1)
///       12     4  frame (uint32: 0 raw, 1 normalized, 2 tilted)
///       16     8  count (uint64)
///       24     8  x_min
///       32     8  dx
///       40     8  time
///       48     8  r
///       56     8  tilt (the frame speed is not stored; tilted snapshots keep only λ)
void write_snapshot(const std::string& path, const Field& field);
Field read_snapshot(const std::string& path);

}  // namespace nlfront
