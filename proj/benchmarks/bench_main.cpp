#include <benchmark/benchmark.h>

#include <random>

#include "phasent/biphoton.hpp"
#include "phasent/camera.hpp"
#include "phasent/denoise.hpp"
#include "phasent/fourier_optics.hpp"
#include "phasent/jpd_recon.hpp"
#include "phasent/parallel.hpp"
#include "phasent/wavelet.hpp"

using namespace phasent;

namespace {

const DGSource kSource(140.2e-6, 12.6e-6, 810e-9);

void BM_FresnelBoth(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double z = z_phase(kSource);
  const Grid2 grid = propagation_grid(kSource, z, n);
  const ComplexField2D psi = eval_dg(kSource, grid, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(fresnel_propagate_both(psi, z, kSource.lambda()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_FresnelBoth)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_GammaAccumulation(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  CameraModel cam;
  cam.eta = 0.6;
  const GaussianPairSource pairs = GaussianPairSource::at_plane(kSource, 0.0, 2.0);
  cam.mu = mu_for_peak_occupancy(pairs, cam, 0.05);
  const FrameStack stack = render_frames(pairs, cam, 5000);
  const Roi roi{(64 - side) / 2, (64 - side) / 2, side, side};
  GammaOptions go;
  go.eta = cam.eta;
  go.mu = cam.mu;
  for (auto _ : state) benchmark::DoNotOptimize(gamma_4d(stack, roi, go));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stack.frames()));
}
BENCHMARK(BM_GammaAccumulation)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Dwt2RoundTrip(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Image img{n, n, std::vector<double>(n * n)};
  Rng rng = stream_rng(3, 0);
  std::normal_distribution<double> n01;
  for (double& v : img.data) v = n01(rng);
  for (auto _ : state) benchmark::DoNotOptimize(idwt2(dwt2(img, 3)));
}
BENCHMARK(BM_Dwt2RoundTrip)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_RenderFrames(benchmark::State& state) {
  CameraModel cam;
  cam.eta = 0.6;
  cam.bloom_prob = 0.3;
  const GaussianPairSource pairs = GaussianPairSource::at_plane(kSource, 0.0, 2.0);
  cam.mu = mu_for_peak_occupancy(pairs, cam, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(render_frames(pairs, cam, 10000));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_RenderFrames)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
