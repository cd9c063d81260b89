#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "phasent/grid.hpp"

namespace phasent::cli {

/// BPG1 grid encoding: "BPG1", u32 n1, u32 n2, f64 x1_0, dx1, x2_0, dx2,
/// u8 dtype (1 = real64, 2 = complex128), then n1 x n2 row-major values.
/// Everything little-endian.
using GridData = std::variant<JPD2, ComplexField2D>;

std::vector<std::uint8_t> encode_grid(const GridData& data);
/// Throws FormatError with the offending byte offset.
GridData decode_grid(std::span<const std::uint8_t> bytes);

void write_grid(const GridData& data, const std::filesystem::path& path);
GridData read_grid(const std::filesystem::path& path);

}  // namespace phasent::cli
