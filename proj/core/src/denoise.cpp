#include "phasent/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phasent/diagnostics.hpp"
#include "phasent/errors.hpp"
#include "phasent/fft.hpp"
#include "phasent/fitting.hpp"

namespace phasent {
namespace {

constexpr double pi = std::numbers::pi;

void check_image(const Image& image) {
  if (image.rows == 0 || image.cols == 0 || image.data.size() != image.rows * image.cols)
    throw DomainError("image storage does not match its shape");
}

// Multiply the 2D spectrum by a radial response (f in cycles per pixel).
template <typename Response>
Image radial_filter(const Image& image, Response&& h) {
  check_image(image);
  std::vector<cplx> spec(image.data.begin(), image.data.end());
  fft::two_d(spec, image.rows, image.cols, fft::Direction::forward);
  for (std::size_t r = 0; r < image.rows; ++r) {
    const double fy = fft::frequency(r, image.rows, 1.0);
    for (std::size_t c = 0; c < image.cols; ++c) {
      const double fx = fft::frequency(c, image.cols, 1.0);
      spec[r * image.cols + c] *= h(std::sqrt(fx * fx + fy * fy));
    }
  }
  fft::two_d(spec, image.rows, image.cols, fft::Direction::inverse);
  Image out{image.rows, image.cols, std::vector<double>(image.data.size())};
  for (std::size_t k = 0; k < spec.size(); ++k) out.data[k] = spec[k].real();
  return out;
}

double pixels_of(const JPD2& jpd, double x) { return x / jpd.grid().a1.dx; }

std::vector<double> row_marginal(const JPD2& jpd) {
  const Grid2& g = jpd.grid();
  std::vector<double> m(g.a1.n, 0.0);
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j) m[i] += jpd(i, j);
  return m;
}

double beam_sigma_px(const JPD2& jpd) {
  const std::vector<double> m = row_marginal(jpd);
  std::vector<double> x(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) x[i] = static_cast<double>(i);
  return fit_gaussian_1d(x, m).std;
}

void report(std::vector<StageReport>& stages, const char* name, const JPD2& before, const JPD2& after) {
  stages.push_back({name, before.mass(), after.mass()});
}

}  // namespace

Image to_image(const JPD2& jpd) {
  return {jpd.grid().a1.n, jpd.grid().a2.n, std::vector<double>(jpd.values().begin(), jpd.values().end())};
}

JPD2 from_image(const Grid2& grid, Image image) {
  if (image.rows != grid.a1.n || image.cols != grid.a2.n) throw DomainError("image shape does not match the grid");
  return {grid, std::move(image.data)};
}

BloomBaseline fit_bloom_weight(const JPD2& jpd, double sigma_b, double sigma_beam, const BloomFitOptions& opts) {
  BloomBaseline unit{sigma_b, sigma_beam, 1.0};
  const JPD2 shape = bloom_baseline(jpd, unit);
  const Grid2& g = jpd.grid();
  double num = 0.0, den = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j) {
      if (opts.skip_main_diagonal && i == j) continue;
      const double d = std::abs(pixels_of(jpd, g.a1.at(i) - g.a2.at(j)));
      if (d > 3.0 * sigma_b || d <= opts.signal_halfwidth) continue;
      num += shape(i, j) * jpd(i, j);
      den += shape(i, j) * shape(i, j);
      ++used;
    }
  if (used == 0 || !(den > 0.0)) {
    warn("signal band covers the whole bloom band; bloom weight taken from the manual amplitude");
    if (!opts.manual_amplitude) throw DomainError("bloom weight cannot be fitted and no manual amplitude was given");
    unit.amplitude = *opts.manual_amplitude;
    return unit;
  }
  unit.amplitude = num / den;
  return unit;
}

JPD2 bloom_baseline(const JPD2& like, const BloomBaseline& bloom) {
  if (!(bloom.sigma_b > 0.0) || !(bloom.sigma_beam > 0.0)) throw DomainError("bloom widths must be positive");
  const Grid2& g = like.grid();
  const double ss = std::sqrt(4.0 * bloom.sigma_beam * bloom.sigma_beam + bloom.sigma_b * bloom.sigma_b);
  std::vector<double> v(g.size(), 0.0);
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j) {
      if (i == j) continue;
      const double d = pixels_of(like, g.a1.at(i) - g.a2.at(j)) / bloom.sigma_b;
      const double s = pixels_of(like, g.a1.at(i) + g.a2.at(j)) / ss;
      v[g.index(i, j)] = bloom.amplitude * std::exp(-0.5 * (d * d + s * s));
    }
  return {g, std::move(v)};
}

JPD2 bloom_baseline(const JPD2& jpd, double sigma_b, double sigma_beam, const BloomFitOptions& opts) {
  return bloom_baseline(jpd, fit_bloom_weight(jpd, sigma_b, sigma_beam, opts));
}

JPD2 subtract_baseline(const JPD2& jpd, const JPD2& baseline) {
  if (!(jpd.grid() == baseline.grid())) throw DomainError("baseline grid differs from the density grid");
  std::vector<double> v(jpd.values().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = jpd.values()[k] - baseline.values()[k];
  return {jpd.grid(), std::move(v)};
}

double butterworth_response(double f, double f_lo, double f_hi, int order) {
  const double n2 = 2.0 * order;
  const double low_cut = f_lo > 0.0 ? (f > 0.0 ? 1.0 / (1.0 + std::pow(f_lo / f, n2)) : 0.0) : 1.0;
  const double high_cut = 1.0 / (1.0 + std::pow(f / f_hi, n2));
  return low_cut * high_cut;
}

Image butterworth_bandpass(const Image& image, double f_lo, double f_hi, int order) {
  if (!(f_lo >= 0.0 && f_lo < f_hi && f_hi <= 0.5)) throw DomainError("Butterworth band needs 0 <= f_lo < f_hi <= 0.5");
  if (order < 1) throw DomainError("Butterworth order must be >= 1");
  return radial_filter(image, [&](double f) { return butterworth_response(f, f_lo, f_hi, order); });
}

double marginal_cutoff(std::span<const double> marginal, double threshold) {
  if (marginal.size() < 4) throw DomainError("marginal needs at least 4 samples");
  if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("cutoff threshold must lie in (0, 1)");
  const auto [lo, hi] = std::minmax_element(marginal.begin(), marginal.end());
  if (*hi - *lo <= 1e-12 * std::max(std::abs(*hi), std::abs(*lo)))
    throw DomainError("flat marginal has no defined bandwidth; supply a manual cutoff");
  std::vector<cplx> spec(marginal.begin(), marginal.end());
  fft::one_d(spec, fft::Direction::forward);
  const std::size_t n = spec.size();
  double peak = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) peak = std::max(peak, std::norm(spec[k]));
  for (std::size_t k = 1; k <= n / 2; ++k)
    if (std::norm(spec[k]) < threshold * peak) return fft::frequency(k, n, 1.0);
  throw DomainError("marginal power never falls below the threshold; supply a manual cutoff");
}

Image marginal_highpass(const Image& approx, std::span<const double> marginal, const HighpassOptions& opts) {
  check_image(approx);
  if (!(opts.samples_per_pixel > 0.0)) throw DomainError("samples_per_pixel must be positive");
  const double cutoff_samples = opts.manual_cutoff ? *opts.manual_cutoff : marginal_cutoff(marginal, opts.threshold);
  if (!(cutoff_samples > 0.0)) throw DomainError("high-pass cutoff must be positive");
  const double fc = cutoff_samples * opts.samples_per_pixel;
  return radial_filter(approx, [fc](double f) {
    if (f <= fc) return 0.0;
    if (f >= 2.0 * fc) return 1.0;
    return 0.5 * (1.0 - std::cos(pi * (f - fc) / fc));
  });
}

double tv_objective(const Image& u, const Image& f, double weight) {
  double fid = 0.0, tv = 0.0;
  for (std::size_t r = 0; r < u.rows; ++r)
    for (std::size_t c = 0; c < u.cols; ++c) {
      const double d = u(r, c) - f(r, c);
      fid += d * d;
      const double gx = r + 1 < u.rows ? u(r + 1, c) - u(r, c) : 0.0;
      const double gy = c + 1 < u.cols ? u(r, c + 1) - u(r, c) : 0.0;
      tv += std::sqrt(gx * gx + gy * gy);
    }
  return 0.5 * fid + weight * tv;
}

double tv_default_weight(const Image& image) {
  double m = 0.0;
  for (double v : image.data) m = std::max(m, std::abs(v));
  return 0.1 * m;
}

Image tv_denoise(const Image& image, double weight, int iterations) {
  return tv_denoise(image, weight, iterations, nullptr);
}

Image tv_denoise(const Image& image, double weight, int iterations, std::vector<double>* trace) {
  check_image(image);
  if (!(weight >= 0.0)) throw DomainError("TV weight must be non-negative");
  if (iterations < 0) throw DomainError("TV iterations must be non-negative");
  if (weight == 0.0 || iterations == 0) return image;
  const std::size_t rows = image.rows, cols = image.cols, n = rows * cols;
  constexpr double tau = 0.125;
  std::vector<double> px(n, 0.0), py(n, 0.0), div(n, 0.0), w(n);
  Image u = image;

  auto divergence = [&] {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t k = r * cols + c;
        double dx = r + 1 < rows ? px[k] : 0.0;
        if (r > 0) dx -= px[k - cols];
        double dy = c + 1 < cols ? py[k] : 0.0;
        if (c > 0) dy -= py[k - 1];
        div[k] = dx + dy;
      }
  };

  for (int it = 0; it < iterations; ++it) {
    divergence();
    for (std::size_t k = 0; k < n; ++k) w[k] = div[k] - image.data[k] / weight;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t k = r * cols + c;
        const double gx = r + 1 < rows ? w[k + cols] - w[k] : 0.0;
        const double gy = c + 1 < cols ? w[k + 1] - w[k] : 0.0;
        const double norm = 1.0 + tau * std::sqrt(gx * gx + gy * gy);
        px[k] = (px[k] + tau * gx) / norm;
        py[k] = (py[k] + tau * gy) / norm;
      }
    if (trace) {
      divergence();
      for (std::size_t k = 0; k < n; ++k) u.data[k] = image.data[k] - weight * div[k];
      trace->push_back(tv_objective(u, image, weight));
    }
  }
  divergence();
  for (std::size_t k = 0; k < n; ++k) u.data[k] = image.data[k] - weight * div[k];
  return u;
}

JPD2 kde_smooth(const JPD2& jpd, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DomainError("KDE bandwidth must be positive");
  const Grid2& g = jpd.grid();
  const auto radius = static_cast<long long>(std::ceil(4.0 * bandwidth));
  std::vector<double> kernel(2 * radius + 1);
  for (long long t = -radius; t <= radius; ++t) {
    const double q = static_cast<double>(t) / bandwidth;
    kernel[t + radius] = std::exp(-0.5 * q * q);
  }
  // Push each cell's mass onto its in-bounds neighbours with weights summing to one.
  auto spread = [&](const std::vector<double>& in, std::size_t n_along, std::size_t n_across, bool along_rows) {
    std::vector<double> out(in.size(), 0.0);
    for (std::size_t a = 0; a < n_along; ++a) {
      const long long lo = std::max<long long>(0, static_cast<long long>(a) - radius);
      const long long hi = std::min<long long>(static_cast<long long>(n_along) - 1, static_cast<long long>(a) + radius);
      double norm = 0.0;
      for (long long b = lo; b <= hi; ++b) norm += kernel[b - static_cast<long long>(a) + radius];
      for (long long b = lo; b <= hi; ++b) {
        const double wgt = kernel[b - static_cast<long long>(a) + radius] / norm;
        for (std::size_t x = 0; x < n_across; ++x) {
          const std::size_t src = along_rows ? a * n_across + x : x * n_along + a;
          const std::size_t dst = along_rows ? static_cast<std::size_t>(b) * n_across + x
                                             : x * n_along + static_cast<std::size_t>(b);
          out[dst] += wgt * in[src];
        }
      }
    }
    return out;
  };
  std::vector<double> v(jpd.values().begin(), jpd.values().end());
  v = spread(v, g.a1.n, g.a2.n, true);
  v = spread(v, g.a2.n, g.a1.n, false);
  return {g, std::move(v)};
}

CleanResult clean_pipeline(const JPD2& jpd, CleanProfile profile, const CleanOptions& opts) {
  std::vector<StageReport> stages;
  if (profile == CleanProfile::propagation) {
    JPD2 cur = jpd;
    if (opts.subtract_bloom) {
      const double beam = opts.sigma_beam > 0.0 ? opts.sigma_beam : beam_sigma_px(cur);
      BloomFitOptions bf;
      bf.signal_halfwidth = opts.signal_halfwidth;
      const JPD2 base = bloom_baseline(cur, opts.sigma_b, beam, bf);
      JPD2 next = subtract_baseline(cur, base);
      report(stages, "bloom", cur, next);
      cur = std::move(next);
    }
    double f_lo = 0.0;
    if (opts.f_lo) {
      f_lo = *opts.f_lo;
    } else {
      // Low cut at 1/8 of the widest fitted full width at half maximum.
      const FitResultDG fit = fit_dg_2d(cur, DGFitOptions{.skip_main_diagonal = true});
      const double widest = std::max(fit.sigma_plus_fit, fit.sigma_minus_fit) / cur.grid().a1.dx;
      f_lo = 1.0 / (8.0 * 2.0 * std::sqrt(2.0 * std::log(2.0)) * widest);
    }
    const Image filtered = butterworth_bandpass(to_image(cur), f_lo, opts.f_hi, opts.order);
    JPD2 next = from_image(cur.grid(), filtered);
    report(stages, "butterworth", cur, next);
    return {std::move(next), std::move(stages)};
  }

  // Interference profile: marginal from the density itself (equal to the
  // estimator marginal sum over Gamma up to the pair normalization).
  const std::vector<double> marginal = row_marginal(jpd);
  const WaveletPyramid pyr = dwt2(to_image(jpd), opts.levels);
  WaveletPyramid cleaned = pyr;
  HighpassOptions hp;
  hp.threshold = opts.highpass_threshold;
  hp.samples_per_pixel = static_cast<double>(std::size_t{1} << opts.levels);
  cleaned.approximation = marginal_highpass(pyr.approximation, marginal, hp);
  for (WaveletLevel& lv : cleaned.details) {
    for (std::vector<double>* band : {&lv.horizontal, &lv.vertical, &lv.diagonal}) {
      Image img{lv.rows, lv.cols, *band};
      const double wgt = opts.tv_weight ? *opts.tv_weight : tv_default_weight(img);
      *band = tv_denoise(img, wgt, opts.tv_iterations).data;
    }
  }
  const JPD2 recombined = from_image(jpd.grid(), idwt2(cleaned));
  report(stages, "wavelet", jpd, recombined);
  JPD2 smoothed = kde_smooth(recombined, opts.kde_bandwidth);
  report(stages, "kde", recombined, smoothed);
  return {std::move(smoothed), std::move(stages)};
}

}  // namespace phasent
