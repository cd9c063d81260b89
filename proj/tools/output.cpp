#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "phasent/errors.hpp"
#include "phasent/fft.hpp"

#ifndef PHASENT_VERSION
#define PHASENT_VERSION "0.0.0"
#endif

namespace phasent::cli {
namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Provenance::line() const {
  std::ostringstream o;
  o << "phasent " << PHASENT_VERSION << " fft=" << fft::backend_version() << " command=" << command
    << " config=" << std::hex << std::setw(16) << std::setfill('0') << config_hash << std::dec << " seed=" << seed;
  return o.str();
}

std::string fmt(double v, int precision) {
  std::ostringstream o;
  o << std::setprecision(precision) << v;
  return o.str();
}

void write_csv(const std::filesystem::path& path, const Provenance& prov, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_out(path);
  out << "# " << prov.line() << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  finish(out, path);
}

void write_pgm16(const std::filesystem::path& path, const Provenance& prov, const JPD2& map) {
  const auto values = map.values();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  std::ofstream out = open_out(path, std::ios::binary);
  out << "P5\n# " << prov.line() << "\n# range " << fmt(lo, 9) << " " << fmt(hi, 9) << "\n"
      << map.grid().a2.n << " " << map.grid().a1.n << "\n65535\n";
  std::vector<char> bytes(2 * values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto level = static_cast<std::uint16_t>(std::lround((values[k] - lo) * scale));
    bytes[2 * k] = static_cast<char>(level >> 8);
    bytes[2 * k + 1] = static_cast<char>(level & 0xff);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  finish(out, path);
}

void write_report(const std::filesystem::path& path, const Provenance& prov, const Summary& summary) {
  std::ofstream out = open_out(path);
  out << "# " << prov.line() << "\n";
  for (const auto& [k, v] : summary) out << k << " = " << v << "\n";
  finish(out, path);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out = open_out(path);
  out << text;
  finish(out, path);
}

}  // namespace phasent::cli
