#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "phasent/camera.hpp"

namespace phasent {

/// BPF1 frame-stack encoding: "BPF1", u32 width, u32 height, u32 frames,
/// f64 pitch (all little-endian), then frames x height x width bytes in {0,1}.
std::vector<std::uint8_t> encode_stack(const FrameStack& stack);

/// Throws FormatError (with byte offset) on bad magic, truncation, payload
/// length mismatch or non-binary pixel values.
FrameStack decode_stack(std::span<const std::uint8_t> bytes);

/// Throws DomainError for an empty stack, IoError when the file cannot be written.
void write_stack(const FrameStack& stack, const std::filesystem::path& path);
FrameStack read_stack(const std::filesystem::path& path);

}  // namespace phasent
