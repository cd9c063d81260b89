#include "phasent/wavelet.hpp"

#include <array>
#include <cmath>
#include <string>

#include "phasent/errors.hpp"

namespace phasent {
namespace {

const std::array<double, 4> kLow = [] {
  const double r3 = std::sqrt(3.0);
  const double d = 4.0 * std::sqrt(2.0);
  return std::array<double, 4>{(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d};
}();

const std::array<double, 4> kHigh = {kLow[3], -kLow[2], kLow[1], -kLow[0]};

void analyze(const double* in, std::size_t stride, std::size_t n, double* out, std::size_t out_stride) {
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    for (std::size_t m = 0; m < 4; ++m) {
      const double v = in[((2 * k + m) % n) * stride];
      a += kLow[m] * v;
      d += kHigh[m] * v;
    }
    out[k * out_stride] = a;
    out[(half + k) * out_stride] = d;
  }
}

void synthesize(const double* in, std::size_t stride, std::size_t n, double* out, std::size_t out_stride) {
  const std::size_t half = n / 2;
  for (std::size_t t = 0; t < n; ++t) out[t * out_stride] = 0.0;
  for (std::size_t k = 0; k < half; ++k) {
    const double a = in[k * stride];
    const double d = in[(half + k) * stride];
    for (std::size_t m = 0; m < 4; ++m) out[((2 * k + m) % n) * out_stride] += kLow[m] * a + kHigh[m] * d;
  }
}

// Whole-sample reflection: index n + t maps to n - 2 - t.
std::size_t reflect(std::size_t i, std::size_t n) {
  const std::size_t period = 2 * (n - 1);
  std::size_t t = i % period;
  return t < n ? t : period - t;
}

std::size_t round_up(std::size_t n, std::size_t block) { return (n + block - 1) / block * block; }

}  // namespace

std::span<const double> daubechies4() { return kLow; }

std::vector<double> dwt1(std::span<const double> x) {
  if (x.size() < 4 || x.size() % 2 != 0) throw DomainError("dwt1 needs an even length >= 4");
  std::vector<double> out(x.size());
  analyze(x.data(), 1, x.size(), out.data(), 1);
  return out;
}

std::vector<double> idwt1(std::span<const double> coeffs) {
  if (coeffs.size() < 4 || coeffs.size() % 2 != 0) throw DomainError("idwt1 needs an even length >= 4");
  std::vector<double> out(coeffs.size());
  synthesize(coeffs.data(), 1, coeffs.size(), out.data(), 1);
  return out;
}

WaveletPyramid dwt2(const Image& image, int levels) {
  if (levels < 1) throw DomainError("wavelet levels must be >= 1");
  if (image.data.size() != image.rows * image.cols) throw DomainError("image storage does not match its shape");
  const std::size_t block = std::size_t{1} << levels;
  const std::size_t pr = round_up(image.rows, block);
  const std::size_t pc = round_up(image.cols, block);
  if (pr / block * 2 < 4 || pc / block * 2 < 4 || image.rows < 2 || image.cols < 2)
    throw DomainError("image too small for " + std::to_string(levels) + " Daubechies-4 levels");

  WaveletPyramid pyr;
  pyr.rows = image.rows;
  pyr.cols = image.cols;
  pyr.padded_rows = pr;
  pyr.padded_cols = pc;

  std::vector<double> cur(pr * pc);
  for (std::size_t r = 0; r < pr; ++r)
    for (std::size_t c = 0; c < pc; ++c) cur[r * pc + c] = image(reflect(r, image.rows), reflect(c, image.cols));

  std::size_t rows = pr, cols = pc;
  std::vector<double> tmp;
  for (int level = 0; level < levels; ++level) {
    tmp.assign(rows * cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) analyze(&cur[r * cols], 1, cols, &tmp[r * cols], 1);
    std::vector<double> next(rows * cols);
    for (std::size_t c = 0; c < cols; ++c) analyze(&tmp[c], cols, rows, &next[c], cols);

    const std::size_t hr = rows / 2, hc = cols / 2;
    WaveletLevel lv;
    lv.rows = hr;
    lv.cols = hc;
    lv.horizontal.resize(hr * hc);
    lv.vertical.resize(hr * hc);
    lv.diagonal.resize(hr * hc);
    std::vector<double> approx(hr * hc);
    for (std::size_t r = 0; r < hr; ++r)
      for (std::size_t c = 0; c < hc; ++c) {
        approx[r * hc + c] = next[r * cols + c];
        lv.vertical[r * hc + c] = next[r * cols + hc + c];
        lv.horizontal[r * hc + c] = next[(hr + r) * cols + c];
        lv.diagonal[r * hc + c] = next[(hr + r) * cols + hc + c];
      }
    pyr.details.push_back(std::move(lv));
    cur = std::move(approx);
    rows = hr;
    cols = hc;
  }
  pyr.approximation = Image{rows, cols, std::move(cur)};
  return pyr;
}

Image idwt2(const WaveletPyramid& pyr) {
  if (pyr.details.empty()) throw DomainError("empty wavelet pyramid");
  std::vector<double> cur = pyr.approximation.data;
  std::size_t rows = pyr.approximation.rows, cols = pyr.approximation.cols;
  for (auto it = pyr.details.rbegin(); it != pyr.details.rend(); ++it) {
    const WaveletLevel& lv = *it;
    if (lv.rows != rows || lv.cols != cols) throw DomainError("wavelet pyramid levels have inconsistent shapes");
    const std::size_t fr = 2 * rows, fc = 2 * cols;
    std::vector<double> full(fr * fc);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        full[r * fc + c] = cur[r * cols + c];
        full[r * fc + cols + c] = lv.vertical[r * cols + c];
        full[(rows + r) * fc + c] = lv.horizontal[r * cols + c];
        full[(rows + r) * fc + cols + c] = lv.diagonal[r * cols + c];
      }
    std::vector<double> tmp(fr * fc);
    for (std::size_t c = 0; c < fc; ++c) synthesize(&full[c], fc, fr, &tmp[c], fc);
    std::vector<double> out(fr * fc);
    for (std::size_t r = 0; r < fr; ++r) synthesize(&tmp[r * fc], 1, fc, &out[r * fc], 1);
    cur = std::move(out);
    rows = fr;
    cols = fc;
  }
  Image img{pyr.rows, pyr.cols, std::vector<double>(pyr.rows * pyr.cols)};
  for (std::size_t r = 0; r < pyr.rows; ++r)
    for (std::size_t c = 0; c < pyr.cols; ++c) img(r, c) = cur[r * cols + c];
  return img;
}

}  // namespace phasent
