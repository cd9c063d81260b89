#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phasent/grid.hpp"
#include "phasent/wavelet.hpp"

namespace phasent {

Image to_image(const JPD2& jpd);
JPD2 from_image(const Grid2& grid, Image image);

/// Bloom correlation model, widths in pixels. sigma_b is the spill offset
/// std (difference coordinate); sigma_beam the per-photon beam std.
struct BloomBaseline {
  double sigma_b = 1.9;
  double sigma_beam = 0.0;
  double amplitude = 0.0;
};

struct BloomFitOptions {
  /// Half-width in pixels of the true signal band around the diagonal that
  /// is excluded from the weight fit (0: no signal band).
  double signal_halfwidth = 0.0;
  /// Cells on x1 == x2 carry no estimator information and are skipped.
  bool skip_main_diagonal = true;
  /// Used when the signal band swallows the whole bloom band.
  std::optional<double> manual_amplitude;
};

/// Least-squares weight of the bloom DG inside |d| <= 3 sigma_b outside the
/// signal band. Warns and falls back to the manual amplitude (DomainError if
/// absent) when no fit cells remain.
BloomBaseline fit_bloom_weight(const JPD2& jpd, double sigma_b, double sigma_beam, const BloomFitOptions& opts = {});

/// Bloom DG on the grid of `like`: difference std sigma_b, sum std
/// sqrt(4 sigma_beam^2 + sigma_b^2), scaled by amplitude. Main diagonal zeroed.
JPD2 bloom_baseline(const JPD2& like, const BloomBaseline& bloom);
JPD2 bloom_baseline(const JPD2& jpd, double sigma_b, double sigma_beam, const BloomFitOptions& opts = {});
JPD2 subtract_baseline(const JPD2& jpd, const JPD2& baseline);

/// [1 / (1 + (f_lo/f)^(2n))] [1 / (1 + (f/f_hi)^(2n))], f radial in cycles/px.
double butterworth_response(double f, double f_lo, double f_hi, int order);

/// Requires 0 <= f_lo < f_hi <= 0.5 and order >= 1.
Image butterworth_bandpass(const Image& image, double f_lo, double f_hi, int order);

struct HighpassOptions {
  double threshold = 0.01;  ///< fraction of the marginal's peak power
  /// Marginal samples per image pixel (2^levels for a wavelet approximation).
  double samples_per_pixel = 1.0;
  std::optional<double> manual_cutoff;  ///< cycles per marginal sample
};

/// Marginal bandwidth: first positive frequency (cycles per sample) where
/// the marginal power spectrum falls below threshold * peak. Throws
/// DomainError for a flat marginal or one that never falls below.
double marginal_cutoff(std::span<const double> marginal, double threshold = 0.01);

/// Suppresses radial frequencies below the marginal cutoff with a
/// raised-cosine edge rising from 0 at the cutoff to 1 at twice the cutoff.
Image marginal_highpass(const Image& approx, std::span<const double> marginal, const HighpassOptions& opts = {});

/// ROF objective 0.5 |u - f|^2 + weight TV(u) with isotropic forward differences.
double tv_objective(const Image& u, const Image& f, double weight);

/// Dual projection (fixed step 1/8). weight 0 returns the input.
Image tv_denoise(const Image& image, double weight, int iterations = 100);
/// Same, also returning the objective after every iteration.
Image tv_denoise(const Image& image, double weight, int iterations, std::vector<double>* objective_trace);
/// 0.1 * max |image|.
double tv_default_weight(const Image& image);

/// Gaussian kernel convolution with in-bounds renormalization per source cell
/// (mass preserved exactly). bandwidth in pixels, > 0.
JPD2 kde_smooth(const JPD2& jpd, double bandwidth);

enum class CleanProfile { propagation, interference };

struct CleanOptions {
  // propagation profile
  bool subtract_bloom = true;
  double sigma_b = 1.9;      ///< px
  double sigma_beam = 0.0;   ///< px; 0 = fit the beam from the marginal
  double signal_halfwidth = 0.0;
  std::optional<double> f_lo;  ///< default 1 / (8 widest fitted width)
  double f_hi = 0.5;
  int order = 3;
  // interference profile
  int levels = 2;
  double highpass_threshold = 0.01;
  std::optional<double> tv_weight;  ///< default 0.1 max |detail|
  int tv_iterations = 100;
  double kde_bandwidth = 0.5;  ///< px
};

struct StageReport {
  std::string stage;
  double mass_before;
  double mass_after;
};

struct CleanResult {
  JPD2 density;
  std::vector<StageReport> stages;
};

CleanResult clean_pipeline(const JPD2& jpd, CleanProfile profile, const CleanOptions& opts = {});

}  // namespace phasent
