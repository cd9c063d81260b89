#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "phasent/biphoton.hpp"
#include "phasent/fourier_optics.hpp"
#include "phasent/grid.hpp"

namespace phasent {

using Rng = std::mt19937_64;

/// Independent generator for stream `index` of a seeded family (frames,
/// workers). Streams do not depend on evaluation order.
Rng stream_rng(std::uint64_t seed, std::uint64_t index);

/// Axis-aligned pixel rectangle.
struct PixelRect {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t w = 0;
  std::size_t h = 0;

  std::size_t pixels() const { return w * h; }
  bool operator==(const PixelRect&) const = default;
};

/// Photon-counting camera. Pair rate mu is pairs per frame over the whole
/// sensor; photons outside the sensor are lost. The optical axis hits the
/// sensor centre. Blooming spills along the serial-readout (x) direction.
struct CameraModel {
  std::size_t width = 64;
  std::size_t height = 64;
  double pitch = 16e-6;
  double eta = 1.0;
  double mu = 1.0;
  double bloom_prob = 0.0;
  double bloom_sigma = 1.9;  ///< pixels
  double bg_rate = 0.0;      ///< background singles per frame
  std::uint64_t seed = 1;
  std::optional<PixelRect> background_envelope;  ///< defaults to the full sensor

  /// Throws DomainError when a field is outside its admissible range.
  void validate() const;

  /// Column (or row) hit by transverse coordinate x, if on the sensor.
  std::optional<std::size_t> column_of(double x) const;
  std::optional<std::size_t> row_of(double y) const;
  /// Physical coordinate of a column centre.
  double column_center(std::size_t col) const;
  double row_center(std::size_t row) const;
};

struct PhotonPair {
  double x1;
  double x2;
};

/// Source of photon-pair transverse coordinates in the detection plane.
class PairSource {
 public:
  virtual ~PairSource() = default;
  virtual PhotonPair sample(Rng& rng) const = 0;
};

/// Gaussian pair law: x1 + x2 ~ N(0, sigma_sum), x1 - x2 ~ N(0, sigma_diff),
/// independently. This is exactly the DG modulus squared in the detection plane.
class GaussianPairSource final : public PairSource {
 public:
  GaussianPairSource(double sigma_sum, double sigma_diff);

  PhotonPair sample(Rng& rng) const override;
  double sigma_sum() const { return sigma_sum_; }
  double sigma_diff() const { return sigma_diff_; }

  /// DG state propagated by z, imaged with transverse magnification m.
  static GaussianPairSource at_plane(const DGSource& src, double z, double magnification = 1.0);
  /// DG state seen at the folded detection distance of a single lens.
  static GaussianPairSource folded(const DGSource& src, const LensFoldMap& fold);
  /// Back focal plane of a lens of focal length f (scaled far field).
  static GaussianPairSource focal_plane(const DGSource& src, double f);
  /// Two independent photons, each N(0, sigma_beam): no pair correlation.
  static GaussianPairSource uncorrelated(double sigma_beam);

 private:
  double sigma_sum_;
  double sigma_diff_;
};

/// Samples an arbitrary non-negative density by CDF inversion over grid cells,
/// with uniform jitter inside the cell.
class GridPairSource final : public PairSource {
 public:
  explicit GridPairSource(const JPD2& jpd);
  PhotonPair sample(Rng& rng) const override;

 private:
  Grid2 grid_;
  std::vector<double> cdf_;
};

/// Exact DG sampling in rotated coordinates: u ~ N(0, sigma-(z)),
/// v ~ N(0, sigma+(z)), x1 = (v + u)/2, x2 = (v - u)/2.
std::vector<PhotonPair> sample_pairs_dg(const DGSource& src, double z, std::size_t n, std::uint64_t seed);
std::vector<PhotonPair> sample_pairs_grid(const JPD2& jpd, std::size_t n, std::uint64_t seed);

/// Binary frame stack stored as per-frame sorted lists of lit pixel indices
/// (y * width + x). Equivalent to an M x height x width array of {0,1}.
class FrameStack {
 public:
  FrameStack(std::size_t width, std::size_t height, double pitch, std::vector<std::uint64_t> offsets,
             std::vector<std::uint32_t> lit);

  static FrameStack from_dense(std::size_t width, std::size_t height, double pitch, std::size_t frames,
                               std::span<const std::uint8_t> counts);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  double pitch() const { return pitch_; }
  std::size_t frames() const { return offsets_.size() - 1; }

  std::span<const std::uint32_t> lit(std::size_t frame) const;
  std::uint8_t at(std::size_t frame, std::size_t x, std::size_t y) const;
  std::vector<std::uint8_t> dense_frame(std::size_t frame) const;
  std::size_t total_counts() const { return lit_.size(); }
  /// Per-pixel mean count over frames.
  std::vector<double> mean_occupancy() const;

  bool operator==(const FrameStack&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  double pitch_;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> lit_;
};

/// Render M frames. Per frame: P ~ Poisson(mu) pairs; x coordinates from one
/// source draw, y coordinates from an independent draw; each photon survives
/// with probability eta; Poisson(bg_rate) background singles uniform over the
/// envelope; blooming; counts clamped to 1. Frame k uses stream_rng(seed, k),
/// so output is independent of worker count. Warns when the per-pixel mean
/// occupancy exceeds 0.1.
FrameStack render_frames(const PairSource& source, const CameraModel& camera, std::size_t frames);

/// Each lit pixel, with probability bloom_prob, lights the pixel at horizontal
/// offset round(N(0, bloom_sigma)) (offset 0 redrawn). Spills leaving the
/// sensor are dropped. Result stays binary.
std::vector<std::uint8_t> apply_blooming(std::span<const std::uint8_t> frame, std::size_t width,
                                         std::size_t height, double bloom_prob, double bloom_sigma,
                                         std::uint64_t seed);

inline constexpr double kMaxOccupancy = 0.1;

/// Pair rate giving the requested mean count in the brightest pixel for a
/// Gaussian source centred on the sensor (x and y drawn independently).
double mu_for_peak_occupancy(const GaussianPairSource& source, const CameraModel& camera, double target);

}  // namespace phasent
