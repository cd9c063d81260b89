#include "phasent/camera.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phasent/diagnostics.hpp"
#include "phasent/errors.hpp"
#include "phasent/parallel.hpp"

namespace phasent {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::optional<std::size_t> bin_of(double x, double pitch, std::size_t n) {
  const double c = std::floor(x / pitch + 0.5 * static_cast<double>(n));
  if (!(c >= 0.0) || c >= static_cast<double>(n)) return std::nullopt;
  return static_cast<std::size_t>(c);
}

double bin_center(std::size_t c, double pitch, std::size_t n) {
  return (static_cast<double>(c) + 0.5 - 0.5 * static_cast<double>(n)) * pitch;
}

void sort_unique(std::vector<std::uint32_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Spill offsets of exactly 0 are redrawn; after a bounded number of redraws
// (only reachable for sub-pixel sigma) fall back to a unit step.
int spill_offset(double sigma, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, sigma);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double r = std::round(gauss(rng));
    if (r != 0.0) return static_cast<int>(r);
  }
  return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? -1 : 1;
}

void bloom_lit(std::vector<std::uint32_t>& lit, std::size_t width, double p, double sigma, Rng& rng) {
  if (p <= 0.0) return;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t original = lit.size();
  for (std::size_t k = 0; k < original; ++k) {
    if (unif(rng) >= p) continue;
    const int off = spill_offset(sigma, rng);
    const std::size_t x = lit[k] % width;
    const long long nx = static_cast<long long>(x) + off;
    if (nx < 0 || nx >= static_cast<long long>(width)) continue;
    lit.push_back(static_cast<std::uint32_t>(lit[k] - x + static_cast<std::size_t>(nx)));
  }
  sort_unique(lit);
}

}  // namespace

Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index ^ 0xa0761d6478bd642fULL)));
}

void CameraModel::validate() const {
  if (width < 1 || height < 1) throw DomainError("camera width and height must be >= 1");
  if (width * height > (std::size_t{1} << 31)) throw DomainError("camera sensor too large");
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw DomainError("camera pitch must be positive");
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("camera eta must lie in [0, 1]");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("camera mu must be non-negative");
  if (!(bloom_prob >= 0.0 && bloom_prob < 1.0)) throw DomainError("camera bloom_prob must lie in [0, 1)");
  if (bloom_prob > 0.0 && !(bloom_sigma > 0.0)) throw DomainError("camera bloom_sigma must be positive");
  if (!(bg_rate >= 0.0) || !std::isfinite(bg_rate)) throw DomainError("camera bg_rate must be non-negative");
  if (background_envelope) {
    const PixelRect& e = *background_envelope;
    if (e.w == 0 || e.h == 0 || e.x + e.w > width || e.y + e.h > height)
      throw DomainError("background envelope must be a non-empty rectangle inside the sensor");
  }
}

std::optional<std::size_t> CameraModel::column_of(double x) const { return bin_of(x, pitch, width); }
std::optional<std::size_t> CameraModel::row_of(double y) const { return bin_of(y, pitch, height); }
double CameraModel::column_center(std::size_t col) const { return bin_center(col, pitch, width); }
double CameraModel::row_center(std::size_t row) const { return bin_center(row, pitch, height); }

GaussianPairSource::GaussianPairSource(double sigma_sum, double sigma_diff)
    : sigma_sum_(sigma_sum), sigma_diff_(sigma_diff) {
  if (!(sigma_sum > 0.0) || !(sigma_diff > 0.0) || !std::isfinite(sigma_sum) || !std::isfinite(sigma_diff))
    throw DomainError("Gaussian pair source needs positive finite widths");
}

PhotonPair GaussianPairSource::sample(Rng& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double v = sigma_sum_ * gauss(rng);
  const double u = sigma_diff_ * gauss(rng);
  return {0.5 * (v + u), 0.5 * (v - u)};
}

GaussianPairSource GaussianPairSource::at_plane(const DGSource& src, double z, double magnification) {
  if (magnification == 0.0 || !std::isfinite(magnification)) throw DomainError("magnification must be non-zero");
  const PropagatedWidths w = widths_at(src, z);
  const double m = std::abs(magnification);
  return {m * w.sigma_plus_z, m * w.sigma_minus_z};
}

GaussianPairSource GaussianPairSource::folded(const DGSource& src, const LensFoldMap& fold) {
  return at_plane(src, fold.z, fold.magnification());
}

GaussianPairSource GaussianPairSource::focal_plane(const DGSource& src, double f) {
  if (!(f > 0.0)) throw DomainError("focal length must be positive");
  // Far field x = lambda f nu: the sum coordinate narrows to f/(k sigma+).
  return {f / (src.k() * src.sigma_plus()), f / (src.k() * src.sigma_minus())};
}

GaussianPairSource GaussianPairSource::uncorrelated(double sigma_beam) {
  return {std::sqrt(2.0) * sigma_beam, std::sqrt(2.0) * sigma_beam};
}

GridPairSource::GridPairSource(const JPD2& jpd) : grid_(jpd.grid()) {
  cdf_.resize(jpd.values().size());
  double acc = 0.0;
  for (std::size_t k = 0; k < cdf_.size(); ++k) {
    const double v = jpd.values()[k];
    if (v < 0.0 || !std::isfinite(v)) throw DomainError("grid sampling needs a non-negative density (clip first)");
    acc += v;
    cdf_[k] = acc;
  }
  if (!(acc > 0.0)) throw DomainError("grid sampling needs positive total mass");
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

PhotonPair GridPairSource::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
  const std::size_t i = k / grid_.a2.n;
  const std::size_t j = k % grid_.a2.n;
  const double x1 = grid_.a1.at(i) + (unif(rng) - 0.5) * grid_.a1.dx;
  const double x2 = grid_.a2.at(j) + (unif(rng) - 0.5) * grid_.a2.dx;
  return {x1, x2};
}

std::vector<PhotonPair> sample_pairs_dg(const DGSource& src, double z, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("need at least one sample");
  const PropagatedWidths w = widths_at(src, z);
  const GaussianPairSource pairs(w.sigma_plus_z, w.sigma_minus_z);
  Rng rng = stream_rng(seed, 0);
  std::vector<PhotonPair> out(n);
  for (PhotonPair& p : out) p = pairs.sample(rng);
  return out;
}

std::vector<PhotonPair> sample_pairs_grid(const JPD2& jpd, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("need at least one sample");
  const GridPairSource pairs(jpd);
  Rng rng = stream_rng(seed, 0);
  std::vector<PhotonPair> out(n);
  for (PhotonPair& p : out) p = pairs.sample(rng);
  return out;
}

FrameStack::FrameStack(std::size_t width, std::size_t height, double pitch, std::vector<std::uint64_t> offsets,
                       std::vector<std::uint32_t> lit)
    : width_(width), height_(height), pitch_(pitch), offsets_(std::move(offsets)), lit_(std::move(lit)) {
  if (width_ < 1 || height_ < 1) throw DomainError("frame stack needs positive width and height");
  if (!(pitch_ > 0.0)) throw DomainError("frame stack pitch must be positive");
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != lit_.size())
    throw DomainError("frame stack offsets do not match the lit-pixel list");
  const std::size_t npix = width_ * height_;
  for (std::size_t k = 0; k + 1 < offsets_.size(); ++k) {
    if (offsets_[k + 1] < offsets_[k]) throw DomainError("frame stack offsets must be non-decreasing");
    for (std::uint64_t t = offsets_[k]; t < offsets_[k + 1]; ++t) {
      if (lit_[t] >= npix) throw DomainError("lit pixel index outside the frame");
      if (t > offsets_[k] && lit_[t] <= lit_[t - 1]) throw DomainError("lit pixels must be strictly increasing");
    }
  }
}

FrameStack FrameStack::from_dense(std::size_t width, std::size_t height, double pitch, std::size_t frames,
                                  std::span<const std::uint8_t> counts) {
  const std::size_t npix = width * height;
  if (counts.size() != npix * frames) throw DomainError("dense frame data has the wrong length");
  std::vector<std::uint64_t> offsets{0};
  offsets.reserve(frames + 1);
  std::vector<std::uint32_t> lit;
  for (std::size_t k = 0; k < frames; ++k) {
    for (std::size_t p = 0; p < npix; ++p) {
      const std::uint8_t c = counts[k * npix + p];
      if (c > 1) throw DomainError("frame counts must be 0 or 1");
      if (c == 1) lit.push_back(static_cast<std::uint32_t>(p));
    }
    offsets.push_back(lit.size());
  }
  return {width, height, pitch, std::move(offsets), std::move(lit)};
}

std::span<const std::uint32_t> FrameStack::lit(std::size_t frame) const {
  if (frame >= frames()) throw DomainError("frame index out of range");
  return std::span<const std::uint32_t>(lit_).subspan(offsets_[frame], offsets_[frame + 1] - offsets_[frame]);
}

std::uint8_t FrameStack::at(std::size_t frame, std::size_t x, std::size_t y) const {
  if (x >= width_ || y >= height_) throw DomainError("pixel outside the frame");
  const auto l = lit(frame);
  return std::binary_search(l.begin(), l.end(), static_cast<std::uint32_t>(y * width_ + x)) ? 1 : 0;
}

std::vector<std::uint8_t> FrameStack::dense_frame(std::size_t frame) const {
  std::vector<std::uint8_t> out(width_ * height_, 0);
  for (std::uint32_t p : lit(frame)) out[p] = 1;
  return out;
}

std::vector<double> FrameStack::mean_occupancy() const {
  std::vector<double> occ(width_ * height_, 0.0);
  if (frames() == 0) return occ;
  for (std::uint32_t p : lit_) occ[p] += 1.0;
  const double inv = 1.0 / static_cast<double>(frames());
  for (double& o : occ) o *= inv;
  return occ;
}

FrameStack render_frames(const PairSource& source, const CameraModel& camera, std::size_t frames) {
  camera.validate();
  if (frames < 2) throw DomainError("render_frames needs at least 2 frames");
  const std::size_t w = camera.width;
  const PixelRect env = camera.background_envelope.value_or(PixelRect{0, 0, camera.width, camera.height});

  std::vector<std::vector<std::uint32_t>> per_frame(frames);
  parallel_for_blocks(frames, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t k = begin; k < end; ++k) {
      Rng rng = stream_rng(camera.seed, k);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::vector<std::uint32_t>& lit = per_frame[k];
      auto deposit = [&](double x, double y) {
        const auto c = camera.column_of(x);
        const auto r = camera.row_of(y);
        if (c && r) lit.push_back(static_cast<std::uint32_t>(*r * w + *c));
      };
      const int pairs = camera.mu > 0.0 ? std::poisson_distribution<int>(camera.mu)(rng) : 0;
      for (int p = 0; p < pairs; ++p) {
        const PhotonPair xs = source.sample(rng);
        const PhotonPair ys = source.sample(rng);
        const double keep1 = unif(rng);
        const double keep2 = unif(rng);
        if (keep1 < camera.eta) deposit(xs.x1, ys.x1);
        if (keep2 < camera.eta) deposit(xs.x2, ys.x2);
      }
      const int singles = camera.bg_rate > 0.0 ? std::poisson_distribution<int>(camera.bg_rate)(rng) : 0;
      std::uniform_int_distribution<std::size_t> bx(env.x, env.x + env.w - 1);
      std::uniform_int_distribution<std::size_t> by(env.y, env.y + env.h - 1);
      for (int b = 0; b < singles; ++b) {
        const std::size_t x = bx(rng);
        const std::size_t y = by(rng);
        lit.push_back(static_cast<std::uint32_t>(y * w + x));
      }
      sort_unique(lit);
      bloom_lit(lit, w, camera.bloom_prob, camera.bloom_sigma, rng);
    }
  });

  std::vector<std::uint64_t> offsets{0};
  offsets.reserve(frames + 1);
  std::size_t total = 0;
  for (const auto& f : per_frame) total += f.size();
  std::vector<std::uint32_t> lit;
  lit.reserve(total);
  for (auto& f : per_frame) {
    lit.insert(lit.end(), f.begin(), f.end());
    offsets.push_back(lit.size());
    std::vector<std::uint32_t>().swap(f);
  }
  FrameStack stack(camera.width, camera.height, camera.pitch, std::move(offsets), std::move(lit));

  const std::vector<double> occ = stack.mean_occupancy();
  const double peak = *std::max_element(occ.begin(), occ.end());
  if (peak > kMaxOccupancy) {
    std::ostringstream msg;
    msg << "peak per-pixel mean occupancy " << peak << " exceeds " << kMaxOccupancy
        << "; the binary-count estimator is biased at this rate (lower mu)";
    warn(msg.str());
  }
  return stack;
}

double mu_for_peak_occupancy(const GaussianPairSource& source, const CameraModel& camera, double target) {
  if (!(target > 0.0)) throw DomainError("target occupancy must be positive");
  if (!(camera.eta > 0.0)) throw DomainError("camera eta must be positive");
  // Each photon's coordinate has std sqrt(sigma_sum^2 + sigma_diff^2) / 2.
  const double s = 0.5 * std::hypot(source.sigma_sum(), source.sigma_diff());
  auto cell = [&](std::size_t n) {
    const double edge = (n % 2 == 0) ? 0.0 : -0.5 * camera.pitch;
    return 0.5 * (std::erf((edge + camera.pitch) / (std::sqrt(2.0) * s)) - std::erf(edge / (std::sqrt(2.0) * s)));
  };
  const double p = cell(camera.width) * cell(camera.height);
  return target / (2.0 * camera.eta * p);
}

std::vector<std::uint8_t> apply_blooming(std::span<const std::uint8_t> frame, std::size_t width,
                                         std::size_t height, double bloom_prob, double bloom_sigma,
                                         std::uint64_t seed) {
  if (frame.size() != width * height) throw DomainError("frame size does not match width x height");
  if (!(bloom_prob >= 0.0 && bloom_prob < 1.0)) throw DomainError("bloom_prob must lie in [0, 1)");
  if (bloom_prob > 0.0 && !(bloom_sigma > 0.0)) throw DomainError("bloom_sigma must be positive");
  std::vector<std::uint32_t> lit;
  for (std::size_t p = 0; p < frame.size(); ++p) {
    if (frame[p] > 1) throw DomainError("blooming needs a binary frame");
    if (frame[p] == 1) lit.push_back(static_cast<std::uint32_t>(p));
  }
  Rng rng = stream_rng(seed, 0);
  bloom_lit(lit, width, bloom_prob, bloom_sigma, rng);
  std::vector<std::uint8_t> out(frame.size(), 0);
  for (std::uint32_t p : lit) out[p] = 1;
  return out;
}

}  // namespace phasent
