#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "phasent/biphoton.hpp"
#include "phasent/camera.hpp"
#include "phasent/fourier_optics.hpp"
#include "phasent/jpd_recon.hpp"

namespace phasent::cli {

/// Bad configuration text or value. The message names the offending
/// section.key (and line, when parsing).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run configuration in SI units. Text form uses um / nm / mm as the key
/// suffixes say.
struct RunConfig {
  // [source]
  double sigma_plus = 140.2e-6;
  double sigma_minus = 12.6e-6;
  double lambda = 810e-9;
  // [lens]
  double u = 60e-3;
  double f = 40e-3;
  // [camera]; mu = 0 picks the pair rate from target_occupancy
  CameraModel camera = [] {
    CameraModel m;
    m.eta = 0.6;
    m.mu = 0.0;
    return m;
  }();
  double target_occupancy = 0.05;
  // [slit]
  SlitSpec slit{400e-6, 150e-6};
  double f3 = 125e-3;
  double relay_f1 = 75e-3;
  double relay_f2 = 150e-3;
  // [run]
  std::size_t frames = 20000;
  std::optional<Roi> roi;
  std::filesystem::path output = "out";
  std::size_t grid = 1024;

  DGSource source() const { return {sigma_plus, sigma_minus, lambda}; }
  /// ROI to reconstruct: configured, else a centred 64 x 64 clipped to the sensor.
  Roi effective_roi() const;
};

/// Parse sectioned key = value text. '#' and ';' start comments. Unknown
/// sections or keys, duplicates and out-of-range values throw ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form (15 significant digits); to_text(parse_config(to_text(c)))
/// equals to_text(c).
std::string to_text(const RunConfig& config);

/// Cross-field checks (also run by parse_config).
void validate(const RunConfig& config);

}  // namespace phasent::cli
