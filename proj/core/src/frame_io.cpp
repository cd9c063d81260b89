#include "phasent/frame_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "phasent/errors.hpp"

namespace phasent {
namespace {

constexpr char kMagic[4] = {'B', 'P', 'F', '1'};
constexpr std::size_t kHeaderBytes = 4 + 3 * 4 + 8;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t at, int width) {
  std::uint64_t v = 0;
  for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(bytes[at + b]) << (8 * b);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_stack(const FrameStack& stack) {
  if (stack.frames() == 0) throw DomainError("refusing to write an empty frame stack (M = 0)");
  const std::size_t npix = stack.width() * stack.height();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + npix * stack.frames());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(stack.width()));
  put_u32(out, static_cast<std::uint32_t>(stack.height()));
  put_u32(out, static_cast<std::uint32_t>(stack.frames()));
  put_f64(out, stack.pitch());
  const std::size_t base = out.size();
  out.resize(base + npix * stack.frames(), 0);
  for (std::size_t k = 0; k < stack.frames(); ++k)
    for (std::uint32_t p : stack.lit(k)) out[base + k * npix + p] = 1;
  return out;
}

FrameStack decode_stack(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("truncated BPF1 magic", bytes.size());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic, expected BPF1", 0);
  if (bytes.size() < kHeaderBytes) throw FormatError("truncated BPF1 header", bytes.size());
  const std::uint64_t width = get_le(bytes, 4, 4);
  const std::uint64_t height = get_le(bytes, 8, 4);
  const std::uint64_t frames = get_le(bytes, 12, 4);
  const double pitch = std::bit_cast<double>(get_le(bytes, 16, 8));
  if (width == 0) throw FormatError("zero frame width", 4);
  if (height == 0) throw FormatError("zero frame height", 8);
  if (frames == 0) throw FormatError("zero frame count", 12);
  if (!(pitch > 0.0)) throw FormatError("non-positive pixel pitch", 16);
  const std::uint64_t payload = width * height * frames;
  const std::uint64_t have = bytes.size() - kHeaderBytes;
  if (have < payload) throw FormatError("payload shorter than width x height x frames", bytes.size());
  if (have > payload) throw FormatError("payload longer than width x height x frames", kHeaderBytes + payload);
  for (std::uint64_t t = 0; t < payload; ++t)
    if (bytes[kHeaderBytes + t] > 1) throw FormatError("pixel value is not 0 or 1", kHeaderBytes + t);
  return FrameStack::from_dense(width, height, pitch, frames, bytes.subspan(kHeaderBytes));
}

void write_stack(const FrameStack& stack, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_stack(stack);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

FrameStack read_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_stack(bytes);
}

}  // namespace phasent
