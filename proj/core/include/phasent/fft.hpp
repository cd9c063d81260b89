#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phasent/grid.hpp"

namespace phasent::fft {

enum class Direction { forward, inverse };

/// In-place unnormalized DFT of every line of a row-major n1 x n2 array along
/// one axis (1 = across rows, 2 = within rows). The inverse is scaled by 1/n so
/// that inverse(forward(x)) == x. Plans and scratch are per call.
void along_axis(std::span<cplx> data, std::size_t n1, std::size_t n2, int axis, Direction dir);

/// In-place 2D DFT (same normalization convention).
void two_d(std::span<cplx> data, std::size_t n1, std::size_t n2, Direction dir);

/// In-place 1D DFT.
void one_d(std::span<cplx> data, Direction dir);

/// Version string of the FFT library in use.
std::string backend_version();

/// Signed DFT frequency of bin k for n samples at pitch dx (cycles per unit).
inline double frequency(std::size_t k, std::size_t n, double dx) {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  return (k < (n + 1) / 2 ? kk : kk - nn) / (nn * dx);
}

/// Swap half-spaces so the zero frequency sits at index n/2.
template <typename T>
void shift_2d(std::vector<T>& data, std::size_t n1, std::size_t n2) {
  std::vector<T> out(data.size());
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t si = (i + n1 / 2) % n1;
    for (std::size_t j = 0; j < n2; ++j) out[si * n2 + (j + n2 / 2) % n2] = data[i * n2 + j];
  }
  data.swap(out);
}

}  // namespace phasent::fft
