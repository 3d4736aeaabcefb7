#pragma once

#include <filesystem>
#include <string>

#include "phaseflow/grid.hpp"

namespace phaseflow {

/// CSV with header `t,u` (1D) or `x,y,u` (2D). A non-empty `comment` is
/// written first as a `# ...` line. Values use 17 significant digits.
void write_field_csv(const std::filesystem::path& path, const Field1D& f, const std::string& comment = {});
void write_field_csv(const std::filesystem::path& path, const Field2D& f, const std::string& comment = {});

/// Reads values back onto a known grid (node order must match). Fixed-mask information is not stored in CSV.
Field1D read_field_csv(const std::filesystem::path& path, const Grid1D& grid);

/// Binary layout: magic "PHF1", then little-endian doubles
/// [dims, p0, p1, nx, ny, tx, ty, n, h, periodic], nodal values, mask (0 free / 1 fixed).
/// For 1D, p0 = a, p1 = b and the frame entries are zero.
void write_field_binary(const std::filesystem::path& path, const Field1D& f);
void write_field_binary(const std::filesystem::path& path, const Field2D& f);
Field1D read_field_binary_1d(const std::filesystem::path& path);
Field2D read_field_binary_2d(const std::filesystem::path& path);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace phaseflow
