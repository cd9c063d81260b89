#include "phasent/jpd_recon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phasent/diagnostics.hpp"
#include "phasent/errors.hpp"
#include "phasent/parallel.hpp"

namespace phasent {
namespace {

// ROI-local lit lists for every frame, in CSR form.
struct RoiFrames {
  std::vector<std::uint64_t> offsets;
  std::vector<std::uint32_t> pixels;

  std::span<const std::uint32_t> frame(std::size_t k) const {
    return std::span<const std::uint32_t>(pixels).subspan(offsets[k], offsets[k + 1] - offsets[k]);
  }
};

void check_roi(const FrameStack& stack, const Roi& roi, bool allow_large) {
  if (roi.w == 0 || roi.h == 0) throw DomainError("ROI must be non-empty");
  if (roi.x + roi.w > stack.width() || roi.y + roi.h > stack.height()) {
    std::ostringstream msg;
    msg << "ROI (" << roi.x << ", " << roi.y << ", " << roi.w << ", " << roi.h << ") lies outside the "
        << stack.width() << "x" << stack.height() << " frame";
    throw DomainError(msg.str());
  }
  if (roi.pixels() > kMaxRoiPixels && !allow_large)
    throw DomainError("ROI has " + std::to_string(roi.pixels()) + " pixels; above " +
                      std::to_string(kMaxRoiPixels) + " requires an explicit override");
  if (stack.frames() < 2) throw DomainError("ensemble averages need at least 2 frames");
}

RoiFrames roi_frames(const FrameStack& stack, const Roi& roi) {
  RoiFrames out;
  out.offsets.reserve(stack.frames() + 1);
  out.offsets.push_back(0);
  const std::size_t w = stack.width();
  for (std::size_t k = 0; k < stack.frames(); ++k) {
    for (std::uint32_t p : stack.lit(k)) {
      const std::size_t x = p % w;
      const std::size_t y = p / w;
      if (x >= roi.x && x < roi.x + roi.w && y >= roi.y && y < roi.y + roi.h)
        out.pixels.push_back(static_cast<std::uint32_t>((y - roi.y) * roi.w + (x - roi.x)));
    }
    out.offsets.push_back(out.pixels.size());
  }
  return out;
}

std::size_t row_start(std::size_t i, std::size_t n) { return i * n - i * (i - 1) / 2; }

Axis roi_axis(std::size_t offset, std::size_t n, std::size_t frame_n, double pitch) {
  const double x0 = (static_cast<double>(offset) + 0.5 - 0.5 * static_cast<double>(frame_n)) * pitch;
  return {n, x0, pitch};
}

double weighted_std(const Axis& a, const std::vector<double>& w) {
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s0 += w[i];
    s1 += w[i] * a.at(i);
  }
  if (!(s0 > 0.0)) return 0.0;
  const double mean = s1 / s0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = a.at(i) - mean;
    s2 += w[i] * d * d;
  }
  return std::sqrt(s2 / s0);
}

}  // namespace

EnsembleAverages::EnsembleAverages(Roi roi, std::size_t frames, std::vector<std::uint64_t> singles,
                                   std::vector<std::uint32_t> same, std::vector<std::uint32_t> shifted)
    : roi_(roi), frames_(frames), singles_(std::move(singles)), same_(std::move(same)), shifted_(std::move(shifted)) {
  const std::size_t n = roi_.pixels();
  if (frames_ < 2) throw DomainError("ensemble averages need at least 2 frames");
  if (singles_.size() != n || same_.size() != n * (n + 1) / 2 || shifted_.size() != n * n)
    throw DomainError("ensemble tallies do not match the ROI size");
}

std::size_t EnsembleAverages::packed(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return row_start(i, pixels()) + (j - i);
}

double EnsembleAverages::mean(std::size_t i) const {
  return static_cast<double>(singles_.at(i)) / static_cast<double>(frames_);
}

double EnsembleAverages::same_frame(std::size_t i, std::size_t j) const {
  if (i >= pixels() || j >= pixels()) throw DomainError("pixel index outside the ROI");
  return static_cast<double>(same_[packed(i, j)]) / static_cast<double>(frames_);
}

double EnsembleAverages::shifted(std::size_t i, std::size_t j) const {
  if (i >= pixels() || j >= pixels()) throw DomainError("pixel index outside the ROI");
  return static_cast<double>(shifted_[i * pixels() + j]) / static_cast<double>(frames_ - 1);
}

double EnsembleAverages::all_pairs(std::size_t i, std::size_t j) const {
  const double m = static_cast<double>(frames_);
  const double si = static_cast<double>(singles_.at(i));
  const double sj = static_cast<double>(singles_.at(j));
  const double c = static_cast<double>(same_[packed(i, j)]);
  return (si * sj - c) / (m * (m - 1.0));
}

double EnsembleAverages::product(std::size_t i, std::size_t j, ProductEstimator estimator) const {
  if (estimator == ProductEstimator::all_pairs) return all_pairs(i, j);
  return 0.5 * (shifted(i, j) + shifted(j, i));
}

EnsembleAverages ensemble_averages(const FrameStack& stack, const Roi& roi, bool allow_large_roi) {
  check_roi(stack, roi, allow_large_roi);
  const RoiFrames rf = roi_frames(stack, roi);
  const std::size_t n = roi.pixels();
  const std::size_t m = stack.frames();

  std::vector<std::uint64_t> singles(n, 0);
  for (std::uint32_t p : rf.pixels) ++singles[p];

  std::vector<std::uint32_t> same(n * (n + 1) / 2, 0);
  std::vector<std::uint32_t> shifted(n * n, 0);

  // Each worker owns a block of first-pixel rows, so every tally cell has a
  // single writer and integer counts are independent of the split.
  parallel_for_blocks(n, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto cur = rf.frame(k);
      auto first = std::lower_bound(cur.begin(), cur.end(), static_cast<std::uint32_t>(begin));
      for (auto a = first; a != cur.end() && *a < end; ++a) {
        const std::size_t base = row_start(*a, n) - *a;
        for (auto c = a; c != cur.end(); ++c) ++same[base + *c];
        if (k + 1 < m) {
          const std::size_t row = static_cast<std::size_t>(*a) * n;
          for (std::uint32_t c : rf.frame(k + 1)) ++shifted[row + c];
        }
      }
    }
  });
  return {roi, m, std::move(singles), std::move(same), std::move(shifted)};
}

Gamma4::Gamma4(Roi roi, std::size_t frame_width, std::size_t frame_height, double pitch, double eta, double mu,
               std::vector<double> packed, std::size_t clamped)
    : roi_(roi), frame_width_(frame_width), frame_height_(frame_height), pitch_(pitch), eta_(eta), mu_(mu),
      packed_(std::move(packed)), clamped_(clamped) {
  const std::size_t n = roi_.pixels();
  if (packed_.size() != n * (n + 1) / 2) throw DomainError("Gamma4 storage does not match the ROI size");
}

double Gamma4::operator()(std::size_t i, std::size_t j) const {
  const std::size_t n = pixels();
  if (i >= n || j >= n) throw DomainError("pixel index outside the ROI");
  if (i > j) std::swap(i, j);
  return packed_[row_start(i, n) + (j - i)];
}

double Gamma4::max_abs() const {
  double m = 0.0;
  for (double v : packed_) m = std::max(m, std::abs(v));
  return m;
}

double Gamma4::total() const {
  const std::size_t n = pixels();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += (*this)(i, j);
  return s;
}

Gamma4 gamma_4d(const EnsembleAverages& avg, std::size_t frame_width, std::size_t frame_height, double pitch,
                const GammaOptions& opts) {
  if (!(opts.eta > 0.0 && opts.eta <= 1.0)) throw DomainError("estimator eta must lie in (0, 1]");
  if (!(opts.mu > 0.0) || !std::isfinite(opts.mu)) throw DomainError("estimator mu must be positive");
  if (!(opts.log_floor > 0.0)) throw DomainError("log floor must be positive");
  const std::size_t n = avg.pixels();

  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, avg.mean(i));
  if (peak > kMaxOccupancy) {
    std::ostringstream msg;
    msg << "ROI pixel mean occupancy " << peak << " exceeds " << kMaxOccupancy << "; estimator is biased";
    warn(msg.str());
  }

  const double norm = 1.0 / (2.0 * opts.eta * opts.eta * opts.mu);
  std::vector<double> packed(n * (n + 1) / 2, 0.0);
  const std::size_t workers = std::max(1u, worker_count());
  std::vector<std::size_t> clamped(workers + 1, 0);
  parallel_for_blocks(n, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    std::size_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double mi = avg.mean(i);
      const std::size_t base = row_start(i, n) - i;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double mj = avg.mean(j);
        const double denom = (1.0 - mi) * (1.0 - mj);
        double arg = denom > 0.0 ? 1.0 + (avg.same_frame(i, j) - avg.product(i, j, opts.estimator)) / denom : 0.0;
        if (!(arg >= opts.log_floor)) {
          arg = opts.log_floor;
          ++local;
        }
        packed[base + j] = norm * std::log(arg);
      }
    }
    clamped[std::min(worker, workers)] += local;
  });
  std::size_t total_clamped = 0;
  for (std::size_t c : clamped) total_clamped += c;
  return {avg.roi(), frame_width, frame_height, pitch, opts.eta, opts.mu, std::move(packed), total_clamped};
}

Gamma4 gamma_4d(const FrameStack& stack, const Roi& roi, const GammaOptions& opts) {
  const EnsembleAverages avg = ensemble_averages(stack, roi, opts.allow_large_roi);
  return gamma_4d(avg, stack.width(), stack.height(), stack.pitch(), opts);
}

namespace {

JPD2 reduce(const Gamma4& g, bool along_x) {
  const Roi& r = g.roi();
  const std::size_t n = r.pixels();
  const std::size_t len = along_x ? r.w : r.h;
  if (len < 2) throw DomainError("reduced axis needs at least 2 pixels");
  const Axis axis = along_x ? roi_axis(r.x, r.w, g.frame_width(), g.pitch())
                            : roi_axis(r.y, r.h, g.frame_height(), g.pitch());
  std::vector<double> rho(len * len, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ci = along_x ? i % r.w : i / r.w;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t cj = along_x ? j % r.w : j / r.w;
      // Accumulate the upper triangle in one fixed order, mirror below.
      const std::size_t lo = std::min(ci, cj), hi = std::max(ci, cj);
      rho[lo * len + hi] += g(i, j);
    }
  }
  for (std::size_t a = 0; a < len; ++a)
    for (std::size_t b = a + 1; b < len; ++b) {
      rho[a * len + b] *= 0.5;
      rho[b * len + a] = rho[a * len + b];
    }
  return {Grid2{axis, axis}, std::move(rho)};
}

}  // namespace

JPD2 reduce_x(const Gamma4& g) { return reduce(g, true); }
JPD2 reduce_y(const Gamma4& g) { return reduce(g, false); }

PeakHistogram::PeakHistogram(std::size_t nx, std::size_t ny, long long origin_x, long long origin_y,
                             std::vector<double> values)
    : nx_(nx), ny_(ny), origin_x_(origin_x), origin_y_(origin_y), values_(std::move(values)) {
  if (values_.size() != nx_ * ny_) throw DomainError("histogram storage does not match its shape");
}

double PeakHistogram::at(long long bx, long long by) const {
  const long long ix = bx - origin_x_;
  const long long iy = by - origin_y_;
  if (ix < 0 || iy < 0 || ix >= static_cast<long long>(nx_) || iy >= static_cast<long long>(ny_)) return 0.0;
  return values_[static_cast<std::size_t>(iy) * nx_ + static_cast<std::size_t>(ix)];
}

std::vector<double> PeakHistogram::project_x() const {
  std::vector<double> out(nx_, 0.0);
  for (std::size_t y = 0; y < ny_; ++y)
    for (std::size_t x = 0; x < nx_; ++x) out[x] += values_[y * nx_ + x];
  return out;
}

std::vector<double> PeakHistogram::project_y() const {
  std::vector<double> out(ny_, 0.0);
  for (std::size_t y = 0; y < ny_; ++y)
    for (std::size_t x = 0; x < nx_; ++x) out[y] += values_[y * nx_ + x];
  return out;
}

namespace {

PeakHistogram pair_histogram(const FrameStack& stack, const Roi& roi, bool sum) {
  check_roi(stack, roi, true);
  const RoiFrames rf = roi_frames(stack, roi);
  const std::size_t nx = 2 * roi.w - 1;
  const std::size_t ny = 2 * roi.h - 1;
  const long long ox = sum ? 0 : -static_cast<long long>(roi.w - 1);
  const long long oy = sum ? 0 : -static_cast<long long>(roi.h - 1);
  std::vector<std::uint64_t> same(nx * ny, 0), cross(nx * ny, 0);
  auto bin = [&](std::uint32_t a, std::uint32_t b) {
    const long long xa = a % roi.w, ya = a / roi.w, xb = b % roi.w, yb = b / roi.w;
    const long long bx = sum ? xa + xb : xa - xb;
    const long long by = sum ? ya + yb : ya - yb;
    return static_cast<std::size_t>(by - oy) * nx + static_cast<std::size_t>(bx - ox);
  };
  const std::size_t m = stack.frames();
  for (std::size_t k = 0; k < m; ++k) {
    const auto cur = rf.frame(k);
    for (std::size_t s = 0; s < cur.size(); ++s)
      for (std::size_t t = 0; t < cur.size(); ++t)
        if (s != t) ++same[bin(cur[s], cur[t])];
    if (k + 1 < m) {
      for (std::uint32_t a : cur)
        for (std::uint32_t b : rf.frame(k + 1)) {
          if (a == b) continue;
          ++cross[bin(a, b)];
          ++cross[bin(b, a)];
        }
    }
  }
  std::vector<double> values(nx * ny);
  const double inv_same = 1.0 / static_cast<double>(m);
  const double inv_cross = 1.0 / (2.0 * static_cast<double>(m - 1));
  for (std::size_t q = 0; q < values.size(); ++q)
    values[q] = static_cast<double>(same[q]) * inv_same - static_cast<double>(cross[q]) * inv_cross;
  return {nx, ny, ox, oy, std::move(values)};
}

}  // namespace

PeakHistogram autoconvolve_frames(const FrameStack& stack, const Roi& roi) { return pair_histogram(stack, roi, true); }
PeakHistogram autocorrelate_frames(const FrameStack& stack, const Roi& roi) {
  return pair_histogram(stack, roi, false);
}

double fedorov_from_jpd(const JPD2& input, const FedorovOptions& opts) {
  if (!(opts.central_fraction > 0.0 && opts.central_fraction <= 1.0))
    throw DomainError("central fraction must lie in (0, 1]");
  if (input.negative_count() > 0 && !opts.clip_negative)
    throw DomainError("density has " + std::to_string(input.negative_count()) +
                      " negative cells; enable clipping to estimate the Fedorov ratio");
  const JPD2 jpd = opts.clip_negative ? input.clipped_nonnegative() : input;
  const Grid2& g = jpd.grid();
  std::vector<double> m1(g.a1.n, 0.0), m2(g.a2.n, 0.0);
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j) {
      m1[i] += jpd(i, j);
      m2[j] += jpd(i, j);
    }
  const double marginal_std = weighted_std(g.a1, m1);
  double total = 0.0;
  for (double v : m2) total += v;
  if (!(total > 0.0) || !(marginal_std > 0.0)) throw DomainError("degenerate density: no spread in the marginal");

  std::vector<double> column(g.a1.n);
  auto conditional_std = [&](std::size_t j) {
    for (std::size_t i = 0; i < g.a1.n; ++i) column[i] = jpd(i, j);
    return weighted_std(g.a1, column);
  };

  double cond = 0.0;
  if (opts.single_slice) {
    const auto jmax = static_cast<std::size_t>(std::max_element(m2.begin(), m2.end()) - m2.begin());
    cond = conditional_std(jmax);
  } else {
    const double lo = 0.5 * (1.0 - opts.central_fraction) * total;
    const double hi = 0.5 * (1.0 + opts.central_fraction) * total;
    double acc = 0.0, wsum = 0.0, csum = 0.0;
    for (std::size_t j = 0; j < g.a2.n; ++j) {
      const double prev = acc;
      acc += m2[j];
      if (m2[j] <= 0.0 || prev >= hi || acc <= lo) continue;
      wsum += m2[j];
      csum += m2[j] * conditional_std(j);
    }
    cond = wsum > 0.0 ? csum / wsum : 0.0;
  }
  if (!(cond > 0.0)) throw DomainError("degenerate density: zero conditional width");
  return marginal_std / cond;
}

}  // namespace phasent
