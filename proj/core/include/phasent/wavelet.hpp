#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace phasent {

/// Row-major real image.
struct Image {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Detail images of one decomposition level (each rows x cols).
struct WaveletLevel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> horizontal;
  std::vector<double> vertical;
  std::vector<double> diagonal;
};

struct WaveletPyramid {
  std::size_t rows = 0;         ///< original image size
  std::size_t cols = 0;
  std::size_t padded_rows = 0;  ///< after reflection padding to a multiple of 2^levels
  std::size_t padded_cols = 0;
  std::vector<WaveletLevel> details;  ///< finest level first
  Image approximation;
};

/// Daubechies-4 analysis filter (orthonormal, 4 taps).
std::span<const double> daubechies4();

/// One-level periodized 1D analysis: first half approximation, second half detail.
std::vector<double> dwt1(std::span<const double> x);
std::vector<double> idwt1(std::span<const double> coeffs);

/// Separable orthonormal 2D transform. Sides that are not multiples of
/// 2^levels are reflection-padded; idwt2 crops back. Each level needs sides >= 4.
WaveletPyramid dwt2(const Image& image, int levels);
Image idwt2(const WaveletPyramid& pyramid);

}  // namespace phasent
