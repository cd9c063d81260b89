#include "grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "phasent/errors.hpp"

namespace phasent::cli {
namespace {

constexpr char kMagic[4] = {'B', 'P', 'G', '1'};
constexpr std::size_t kHeaderBytes = 4 + 2 * 4 + 4 * 8 + 1;
constexpr std::uint8_t kReal = 1;
constexpr std::uint8_t kComplex = 2;

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int width) {
  for (int b = 0; b < width; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v), 8); }

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t at, int width) {
  std::uint64_t v = 0;
  for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(bytes[at + b]) << (8 * b);
  return v;
}

double get_f64(std::span<const std::uint8_t> bytes, std::size_t at) { return std::bit_cast<double>(get_le(bytes, at, 8)); }

const Grid2& grid_of(const GridData& data) {
  return std::visit([](const auto& g) -> const Grid2& { return g.grid(); }, data);
}

}  // namespace

std::vector<std::uint8_t> encode_grid(const GridData& data) {
  const Grid2& g = grid_of(data);
  const bool complex = std::holds_alternative<ComplexField2D>(data);
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + g.size() * (complex ? 16 : 8));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le(out, g.a1.n, 4);
  put_le(out, g.a2.n, 4);
  put_f64(out, g.a1.x0);
  put_f64(out, g.a1.dx);
  put_f64(out, g.a2.x0);
  put_f64(out, g.a2.dx);
  out.push_back(complex ? kComplex : kReal);
  if (complex) {
    for (const cplx& v : std::get<ComplexField2D>(data).values()) {
      put_f64(out, v.real());
      put_f64(out, v.imag());
    }
  } else {
    for (double v : std::get<JPD2>(data).values()) put_f64(out, v);
  }
  return out;
}

GridData decode_grid(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("truncated BPG1 magic", bytes.size());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic, expected BPG1", 0);
  if (bytes.size() < kHeaderBytes) throw FormatError("truncated BPG1 header", bytes.size());
  const std::uint64_t n1 = get_le(bytes, 4, 4);
  const std::uint64_t n2 = get_le(bytes, 8, 4);
  const Axis a1{n1, get_f64(bytes, 12), get_f64(bytes, 20)};
  const Axis a2{n2, get_f64(bytes, 28), get_f64(bytes, 36)};
  const std::uint8_t dtype = bytes[44];
  if (n1 < 2) throw FormatError("axis 1 needs at least 2 samples", 4);
  if (n2 < 2) throw FormatError("axis 2 needs at least 2 samples", 8);
  if (!(a1.dx > 0.0)) throw FormatError("non-positive axis 1 step", 20);
  if (!(a2.dx > 0.0)) throw FormatError("non-positive axis 2 step", 36);
  if (dtype != kReal && dtype != kComplex) throw FormatError("unknown dtype " + std::to_string(dtype), 44);
  const std::uint64_t width = dtype == kComplex ? 16 : 8;
  const std::uint64_t payload = n1 * n2 * width;
  const std::uint64_t have = bytes.size() - kHeaderBytes;
  if (have < payload) throw FormatError("payload shorter than n1 x n2 values", bytes.size());
  if (have > payload) throw FormatError("payload longer than n1 x n2 values", kHeaderBytes + payload);
  const Grid2 grid{a1, a2};
  if (dtype == kComplex) {
    std::vector<cplx> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k)
      v[k] = {get_f64(bytes, kHeaderBytes + 16 * k), get_f64(bytes, kHeaderBytes + 16 * k + 8)};
    return ComplexField2D(grid, std::move(v));
  }
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = get_f64(bytes, kHeaderBytes + 8 * k);
  return JPD2(grid, std::move(v));
}

void write_grid(const GridData& data, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_grid(data);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

GridData read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_grid(bytes);
}

}  // namespace phasent::cli
