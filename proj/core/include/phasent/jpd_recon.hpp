#pragma once

#include <cstdint>
#include <vector>

#include "phasent/camera.hpp"
#include "phasent/grid.hpp"

namespace phasent {

using Roi = PixelRect;

/// ROIs above this many pixels need allow_large_roi (memory grows as pixels^2).
inline constexpr std::size_t kMaxRoiPixels = 96 * 96;

enum class ProductEstimator {
  adjacent_frames,  ///< <c_i><c_j> from frames k and k+1
  all_pairs,        ///< <c_i><c_j> from all ordered frame pairs k != l
};

/// Integer coincidence tallies over a ROI. Pixel index inside the ROI is
/// (y - roi.y) * roi.w + (x - roi.x).
class EnsembleAverages {
 public:
  EnsembleAverages(Roi roi, std::size_t frames, std::vector<std::uint64_t> singles,
                   std::vector<std::uint32_t> same, std::vector<std::uint32_t> shifted);

  const Roi& roi() const { return roi_; }
  std::size_t frames() const { return frames_; }
  std::size_t pixels() const { return roi_.pixels(); }

  /// <c_i>
  double mean(std::size_t i) const;
  /// <c_i c_j> over frames.
  double same_frame(std::size_t i, std::size_t j) const;
  /// (1/(M-1)) sum_k c_i^k c_j^(k+1), directional.
  double shifted(std::size_t i, std::size_t j) const;
  /// (S_i S_j - C_ij) / (M (M - 1)), exact independent-frame average.
  double all_pairs(std::size_t i, std::size_t j) const;
  /// Estimate of <c_i><c_j>. The adjacent-frame form is symmetrized.
  double product(std::size_t i, std::size_t j, ProductEstimator estimator) const;

 private:
  std::size_t packed(std::size_t i, std::size_t j) const;

  Roi roi_;
  std::size_t frames_;
  std::vector<std::uint64_t> singles_;
  std::vector<std::uint32_t> same_;     // upper triangle incl. diagonal
  std::vector<std::uint32_t> shifted_;  // full pixels x pixels
};

/// Throws DomainError for M < 2, a ROI outside the frame, or a ROI above
/// kMaxRoiPixels without allow_large_roi. Bit-identical for any worker count.
EnsembleAverages ensemble_averages(const FrameStack& stack, const Roi& roi, bool allow_large_roi = false);

struct GammaOptions {
  double eta = 1.0;
  double mu = 1.0;
  ProductEstimator estimator = ProductEstimator::adjacent_frames;
  double log_floor = 1e-9;  ///< ln argument floor; floored entries are counted
  bool allow_large_roi = false;
};

/// Pixel-pair joint distribution estimate over a ROI. Symmetric by
/// construction; the same-pixel entry is 0 (a binary pixel cannot hold both
/// photons of a pair).
class Gamma4 {
 public:
  Gamma4(Roi roi, std::size_t frame_width, std::size_t frame_height, double pitch, double eta, double mu,
         std::vector<double> packed, std::size_t clamped);

  const Roi& roi() const { return roi_; }
  std::size_t pixels() const { return roi_.pixels(); }
  double pitch() const { return pitch_; }
  double eta() const { return eta_; }
  double mu() const { return mu_; }
  std::size_t clamped_count() const { return clamped_; }
  std::size_t frame_width() const { return frame_width_; }
  std::size_t frame_height() const { return frame_height_; }

  double operator()(std::size_t i, std::size_t j) const;
  double max_abs() const;
  /// Sum over all ordered pairs (i, j).
  double total() const;

 private:
  Roi roi_;
  std::size_t frame_width_;
  std::size_t frame_height_;
  double pitch_;
  double eta_;
  double mu_;
  std::vector<double> packed_;
  std::size_t clamped_;
};

/// Gamma_ij = ln(1 + (<c_i c_j> - <c_i><c_j>) / ((1 - <c_i>)(1 - <c_j>))) / (2 eta^2 mu).
/// Warns when a ROI pixel has mean occupancy above 0.1.
Gamma4 gamma_4d(const FrameStack& stack, const Roi& roi, const GammaOptions& opts);
Gamma4 gamma_4d(const EnsembleAverages& avg, std::size_t frame_width, std::size_t frame_height, double pitch,
                const GammaOptions& opts);

/// rho(x_i, x_j) = sum over y_i, y_j of Gamma. Axes are the physical column
/// centres of the ROI (sensor centre at 0).
JPD2 reduce_x(const Gamma4& g);
/// Same with the roles of x and y exchanged.
JPD2 reduce_y(const Gamma4& g);

/// Background-corrected lit-pixel pair histogram over a sum (convolution) or
/// difference (correlation) coordinate. Bin (bx, by) holds the same-frame
/// ordered-pair count per frame minus the adjacent-frame equivalent.
class PeakHistogram {
 public:
  PeakHistogram(std::size_t nx, std::size_t ny, long long origin_x, long long origin_y, std::vector<double> values);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  /// Logical bin coordinate of storage column 0 / row 0.
  long long origin_x() const { return origin_x_; }
  long long origin_y() const { return origin_y_; }
  /// Value at logical bin (bx, by); 0 outside.
  double at(long long bx, long long by) const;
  /// Sum over the y bins.
  std::vector<double> project_x() const;
  std::vector<double> project_y() const;

 private:
  std::size_t nx_;
  std::size_t ny_;
  long long origin_x_;
  long long origin_y_;
  std::vector<double> values_;
};

/// Sum-coordinate histogram: bin x_a + x_b in ROI pixel units (0 .. 2w-2).
PeakHistogram autoconvolve_frames(const FrameStack& stack, const Roi& roi);
/// Difference histogram: bin x_a - x_b (-(w-1) .. w-1).
PeakHistogram autocorrelate_frames(const FrameStack& stack, const Roi& roi);

struct FedorovOptions {
  bool clip_negative = false;    ///< clip negative cells instead of rejecting them
  bool single_slice = false;     ///< conditional only at the x2 bin of maximal marginal mass
  double central_fraction = 0.5; ///< central share of x2 marginal mass averaged over
};

/// Ratio of the x1 marginal std to the x1 conditional std. The conditional
/// width is averaged over x2 bins in the central share of x2 mass, weighted by
/// that mass. Throws DomainError for negative cells (without clipping) or a
/// degenerate density.
double fedorov_from_jpd(const JPD2& jpd, const FedorovOptions& opts = {});

}  // namespace phasent
