#pragma once

#include <filesystem>
#include <memory>

#include "bbrt/grid.hpp"

namespace bbrt {

/// Binary value-function container. Header: magic "BBRT1", u32 dim_count,
/// u32 point_counts[dim], f64 mins[dim], f64 maxs[dim], u8 periodic[dim],
/// u32 stamp_count, f64 time_stamps[stamp_count]; then values as
/// little-endian f64 in node-major, time-slice-major order.
void write_value_function(const std::filesystem::path& path, const ValueFunction& vf);

ValueFunction read_value_function(const std::filesystem::path& path);

/// Writes content to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace bbrt
