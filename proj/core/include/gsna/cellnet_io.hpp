#pragma once

#include <filesystem>

#include "gsna/aggregate.hpp"

namespace gsna {

// Binary cell-network container, magic "GSNA1", little-endian fixed-width
// fields. See docs/cellnet_format.md for the layout. Writing the same
// network twice produces identical bytes.
void write_cellnet(const CellNetwork& net, const std::filesystem::path& path);

// Throws std::runtime_error on bad magic, truncation or trailing bytes.
CellNetwork read_cellnet(const std::filesystem::path& path);

}  // namespace gsna
