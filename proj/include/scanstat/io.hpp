// io.hpp - grid file formats: GF01 binary and CSV (d=2).
//
// GF01: 8-byte magic "GFLD0001", little-endian u32 d, u32 dims[d], then
// prod(dims) little-endian float64 values in row-major order.
// CSV: one row per index along the first axis, comma-separated, d=2 only.
#pragma once

#include <string>

#include "scanstat/grid.hpp"

namespace scanstat::io {

void write_gf01(const std::string& path, const GridField& field);
GridField read_gf01(const std::string& path);

void write_csv(const std::string& path, const GridField& field);
GridField read_csv(const std::string& path);

/// Reads GF01 when the magic matches, CSV otherwise.
GridField read_auto(const std::string& path);

}  // namespace scanstat::io
