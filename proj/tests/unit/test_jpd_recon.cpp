#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "phasent/camera.hpp"
#include "phasent/diagnostics.hpp"
#include "phasent/errors.hpp"
#include "phasent/fitting.hpp"
#include "phasent/jpd_recon.hpp"
#include "phasent/parallel.hpp"

using namespace phasent;

namespace {
constexpr double um = 1e-6;
const DGSource src{140.2 * um, 12.6 * um, 810e-9};

FrameStack dense_stack(std::size_t w, std::size_t h, std::size_t m, const std::vector<std::vector<std::size_t>>& lit) {
  std::vector<std::uint8_t> d(w * h * m, 0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t p : lit[k]) d[k * w * h + p] = 1;
  return FrameStack::from_dense(w, h, 16 * um, m, d);
}

std::vector<double> bins(std::size_t n, double start) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = start + static_cast<double>(i);
  return x;
}
}  // namespace

TEST_CASE("ensemble averages by hand") {
  const Roi roi{0, 0, 2, 1};
  const FrameStack both = dense_stack(2, 1, 3, {{0, 1}, {0, 1}, {0, 1}});
  CHECK(ensemble_averages(both, roi).same_frame(0, 1) == doctest::Approx(1.0));

  const FrameStack apart = dense_stack(2, 1, 2, {{0}, {1}});
  const EnsembleAverages a = ensemble_averages(apart, roi);
  CHECK(a.same_frame(0, 1) == 0.0);
  CHECK(a.shifted(0, 1) == doctest::Approx(1.0));
  CHECK(a.shifted(1, 0) == 0.0);
  CHECK(a.mean(0) == doctest::Approx(0.5));

  CHECK_THROWS_AS(ensemble_averages(dense_stack(2, 1, 1, {{0}}), roi), DomainError);
  CHECK_THROWS_AS(ensemble_averages(both, Roi{1, 0, 2, 1}), DomainError);
  const FrameStack big = dense_stack(100, 100, 2, {{}, {}});
  CHECK_THROWS_AS(ensemble_averages(big, Roi{0, 0, 100, 100}), DomainError);
}

TEST_CASE("independent pixels follow binomial statistics") {
  const std::size_t m = 100000;
  const double p = 0.2, q = 0.3;
  Rng rng = stream_rng(11, 0);
  std::bernoulli_distribution bp(p), bq(q);
  std::vector<std::vector<std::size_t>> lit(m);
  for (auto& f : lit) {
    if (bp(rng)) f.push_back(0);
    if (bq(rng)) f.push_back(1);
  }
  const EnsembleAverages a = ensemble_averages(dense_stack(2, 1, m, lit), Roi{0, 0, 2, 1});
  const double tol = 3.0 * std::sqrt(p * q / static_cast<double>(m));
  CHECK(std::abs(a.same_frame(0, 1) - p * q) < tol);
  CHECK(std::abs(a.product(0, 1, ProductEstimator::adjacent_frames) - p * q) < tol);
  CHECK(std::abs(a.product(0, 1, ProductEstimator::all_pairs) - p * q) < tol);
}

TEST_CASE("Gamma from tallies") {
  // <c_i> = <c_j> = 0.1, <c_i c_j> = 0.1, product ~ 0.01.
  const std::size_t m = 1000;
  const EnsembleAverages a(Roi{0, 0, 2, 1}, m, {100, 100}, {100, 100, 100}, {10, 10, 10, 10});
  const Gamma4 g = gamma_4d(a, 2, 1, 16 * um, GammaOptions{});
  const double mean = 0.1, same = 0.1, prod = 10.0 / 999.0;
  const double expected = 0.5 * std::log(1.0 + (same - prod) / ((1.0 - mean) * (1.0 - mean)));
  CHECK(g(0, 1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(g(0, 1) == doctest::Approx(0.0527).epsilon(2e-3));
  CHECK(g(1, 0) == g(0, 1));
  CHECK(g(0, 0) == 0.0);

  GammaOptions scaled;
  scaled.eta = 0.5;
  scaled.mu = 2.0;
  CHECK(gamma_4d(a, 2, 1, 16 * um, scaled)(0, 1) == doctest::Approx(expected * 2.0));

  // Strong anti-correlation drives the ln argument below the floor.
  const EnsembleAverages neg(Roi{0, 0, 2, 1}, 4, {2, 2}, {2, 0, 2}, {0, 3, 3, 0});
  const Gamma4 gn = gamma_4d(neg, 2, 1, 16 * um, GammaOptions{});
  CHECK(gn.clamped_count() > 0);
  CHECK(std::isfinite(gn(0, 1)));
}

TEST_CASE("reduction over rows") {
  const Roi roi{0, 0, 3, 2};
  std::vector<double> packed(6 * 7 / 2, 0.0);
  // Pixel a = (x 0, y 1) -> 3, pixel b = (x 2, y 0) -> 2. Packed upper row 2.
  const std::size_t i = 2, j = 3, n = 6;
  packed[i * n - i * (i - 1) / 2 + (j - i)] = 0.7;
  const Gamma4 g(roi, 3, 2, 16 * um, 1.0, 1.0, packed, 0);
  CHECK(g(3, 2) == doctest::Approx(0.7));
  const JPD2 rx = reduce_x(g);
  CHECK(rx(2, 0) == doctest::Approx(0.7));
  CHECK(rx(0, 2) == doctest::Approx(0.7));
  CHECK(rx.sum() == doctest::Approx(1.4));
  CHECK(rx.grid().a1.at(0) == doctest::Approx(-1.0 * 16 * um));
  const JPD2 ry = reduce_y(g);
  CHECK(ry(0, 1) == doctest::Approx(0.7));
}

TEST_CASE("peak histograms") {
  const FrameStack s = dense_stack(8, 1, 2, {{3, 5}, {}});
  const Roi roi{0, 0, 8, 1};
  const PeakHistogram conv = autoconvolve_frames(s, roi);
  CHECK(conv.at(8, 0) > 0.0);
  CHECK(conv.at(6, 0) == 0.0);
  CHECK(conv.at(10, 0) == 0.0);
  const PeakHistogram corr = autocorrelate_frames(s, roi);
  CHECK(corr.at(2, 0) > 0.0);
  CHECK(corr.at(-2, 0) == corr.at(2, 0));
  CHECK(corr.at(0, 0) == 0.0);
}

TEST_CASE("focal-plane anti-correlation width") {
  CameraModel cam;
  cam.width = 32;
  cam.height = 32;
  cam.seed = 21;
  const double f3 = 40e-3;
  const GaussianPairSource far = GaussianPairSource::focal_plane(src, f3);
  cam.mu = mu_for_peak_occupancy(far, cam, 0.05);
  const FrameStack s = render_frames(far, cam, 20000);
  const PeakHistogram conv = autoconvolve_frames(s, Roi{0, 0, 32, 32});
  const std::vector<double> px = conv.project_x();
  const GaussianFit1D fit = fit_gaussian_1d(bins(px.size(), static_cast<double>(conv.origin_x())), px);
  CHECK(fit.std == doctest::Approx(2.34).epsilon(0.05));
  const double sigma_plus = f3 / (oracle::wavenumber(810e-9) * fit.std * cam.pitch);
  CHECK(sigma_plus == doctest::Approx(140.2 * um).epsilon(0.1));
}

TEST_CASE("imaging-plane correlation width") {
  CameraModel cam;
  cam.width = 32;
  cam.height = 32;
  cam.seed = 22;
  const double mag = 2.0;
  const GaussianPairSource near = GaussianPairSource::at_plane(src, 0.0, mag);
  cam.mu = mu_for_peak_occupancy(near, cam, 0.05);
  const FrameStack s = render_frames(near, cam, 20000);
  const PeakHistogram corr = autocorrelate_frames(s, Roi{0, 0, 32, 32});
  const std::vector<double> px = corr.project_x();
  const GaussianFit1D fit = fit_gaussian_1d(bins(px.size(), static_cast<double>(corr.origin_x())), px);
  CHECK(fit.std * cam.pitch / mag == doctest::Approx(12.6 * um).epsilon(0.1));
}

TEST_CASE("Gamma pipeline recovers the difference width") {
  CameraModel cam;
  cam.width = 40;
  cam.height = 40;
  cam.eta = 0.6;
  cam.seed = 23;
  const double mag = 2.0;
  const GaussianPairSource near = GaussianPairSource::at_plane(src, 0.0, mag);
  cam.mu = mu_for_peak_occupancy(near, cam, 0.08);
  const FrameStack s = render_frames(near, cam, 20000);
  GammaOptions go;
  go.eta = cam.eta;
  go.mu = cam.mu;
  const Gamma4 g = gamma_4d(s, Roi{4, 4, 32, 32}, go);
  const JPD2 rho = reduce_x(g);
  bool symmetric = true;
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j) symmetric = symmetric && rho(i, j) == rho(j, i);
  CHECK(symmetric);
  const FitResultDG fit = fit_dg_2d(rho, DGFitOptions{.skip_main_diagonal = true});
  CHECK(fit.sigma_minus_fit / mag == doctest::Approx(12.6 * um).epsilon(0.1));
}

TEST_CASE("Fedorov ratio from a density") {
  const Grid2 grid = Grid2::square(401, 4.0 * src.sigma_plus());
  const JPD2 rho = jpd_analytic(src, grid, 0.0);
  CHECK(fedorov_from_jpd(rho) == doctest::Approx(fedorov_analytic(src, 0.0)).epsilon(1e-3));

  const DGSource sep{60 * um, 60 * um, 810e-9};
  const JPD2 flat = jpd_analytic(sep, Grid2::square(201, 5.0 * 60 * um), 0.0);
  CHECK(fedorov_from_jpd(flat) == doctest::Approx(1.0).epsilon(1e-6));

  std::vector<double> v(rho.values().begin(), rho.values().end());
  v[0] = -1e-3;
  CHECK_THROWS_AS(fedorov_from_jpd(JPD2{grid, v}), DomainError);
  CHECK_NOTHROW(fedorov_from_jpd(JPD2{grid, v}, FedorovOptions{.clip_negative = true}));
  CHECK_THROWS_AS(fedorov_from_jpd(JPD2{grid, std::vector<double>(grid.size(), 0.0)}), DomainError);
}

TEST_CASE("reductions do not depend on the worker count") {
  CameraModel cam;
  cam.width = 24;
  cam.height = 24;
  cam.mu = 0.6;
  cam.bg_rate = 0.3;
  const FrameStack s = render_frames(GaussianPairSource::at_plane(src, 0.0, 2.0), cam, 3000);
  set_worker_count(1);
  const Gamma4 a = gamma_4d(s, Roi{0, 0, 24, 24}, GammaOptions{});
  set_worker_count(5);
  const Gamma4 b = gamma_4d(s, Roi{0, 0, 24, 24}, GammaOptions{});
  set_worker_count(0);
  bool same = true;
  for (std::size_t i = 0; i < a.pixels(); ++i)
    for (std::size_t j = 0; j < a.pixels(); ++j) same = same && a(i, j) == b(i, j);
  CHECK(same);
  CHECK(a.clamped_count() == b.clamped_count());
}
