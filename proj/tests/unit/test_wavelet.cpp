#include <cmath>
#include <random>

#include "doctest.h"
#include "phasent/camera.hpp"
#include "phasent/errors.hpp"
#include "phasent/wavelet.hpp"

using namespace phasent;

namespace {
Image noise_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng = stream_rng(seed, 0);
  std::normal_distribution<double> n01;
  Image img{rows, cols, std::vector<double>(rows * cols)};
  for (double& v : img.data) v = n01(rng);
  return img;
}

double energy(std::span<const double> v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}
}  // namespace

TEST_CASE("filter is orthonormal") {
  const auto h = daubechies4();
  REQUIRE(h.size() == 4);
  CHECK(energy(h) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h[0] * h[2] + h[1] * h[3] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(h[0] + h[1] + h[2] + h[3] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("one-level 1D round trip and energy") {
  const Image img = noise_image(1, 32, 1);
  const std::vector<double> c = dwt1(img.data);
  CHECK(energy(c) == doctest::Approx(energy(img.data)).epsilon(1e-13));
  const std::vector<double> back = idwt1(c);
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(std::abs(back[i] - img.data[i]) < 1e-13);
  CHECK_THROWS_AS(dwt1(std::vector<double>(7, 1.0)), DomainError);
}

TEST_CASE("2D perfect reconstruction, Parseval and padding") {
  const Image even = noise_image(64, 32, 2);
  const WaveletPyramid p = dwt2(even, 3);
  double coeff = energy(p.approximation.data);
  for (const WaveletLevel& lv : p.details) coeff += energy(lv.horizontal) + energy(lv.vertical) + energy(lv.diagonal);
  CHECK(std::abs(coeff - energy(even.data)) < 1e-10);
  const Image back = idwt2(p);
  for (std::size_t k = 0; k < even.data.size(); ++k) CHECK(std::abs(back.data[k] - even.data[k]) < 1e-12);

  const Image odd = noise_image(37, 50, 3);
  const WaveletPyramid q = dwt2(odd, 2);
  CHECK(q.padded_rows == 40);
  CHECK(q.padded_cols == 52);
  CHECK(q.details.size() == 2);
  const Image back2 = idwt2(q);
  REQUIRE(back2.rows == 37);
  REQUIRE(back2.cols == 50);
  double worst = 0.0;
  for (std::size_t k = 0; k < odd.data.size(); ++k) worst = std::max(worst, std::abs(back2.data[k] - odd.data[k]));
  CHECK(worst < 1e-12);
}

TEST_CASE("constant image has no detail") {
  const Image flat{32, 32, std::vector<double>(32 * 32, 3.5)};
  const WaveletPyramid p = dwt2(flat, 2);
  double worst = 0.0;
  for (const WaveletLevel& lv : p.details)
    for (const auto* band : {&lv.horizontal, &lv.vertical, &lv.diagonal})
      for (double v : *band) worst = std::max(worst, std::abs(v));
  CHECK(worst < 1e-12);
}

TEST_CASE("level limits") {
  CHECK_THROWS_AS(dwt2(noise_image(8, 8, 4), 3), DomainError);
  CHECK_THROWS_AS(dwt2(noise_image(8, 8, 4), 0), DomainError);
}
