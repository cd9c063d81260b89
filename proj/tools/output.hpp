#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phasent/grid.hpp"

namespace phasent::cli {

std::uint64_t fnv1a64(std::string_view text);

/// Who produced an output file, carried as a header line.
struct Provenance {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  /// "phasent <version> fft=<backend> command=<...> config=<hex> seed=<n>"
  std::string line() const;
};

using Summary = std::vector<std::pair<std::string, std::string>>;

/// Header line "# <provenance>", then `columns` and one line per row.
void write_csv(const std::filesystem::path& path, const Provenance& prov, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

/// 16-bit binary PGM, rows along axis 1, linear min..max scaling. The
/// provenance and the value range go into comment lines.
void write_pgm16(const std::filesystem::path& path, const Provenance& prov, const JPD2& map);

/// "key = value" lines after a provenance comment.
void write_report(const std::filesystem::path& path, const Provenance& prov, const Summary& summary);

void write_text(const std::filesystem::path& path, std::string_view text);

std::string fmt(double v, int precision = 6);

}  // namespace phasent::cli
