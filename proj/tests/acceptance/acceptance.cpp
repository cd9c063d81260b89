// End-to-end checks. Prints one PASS/FAIL line per criterion; the exit code is
// the number of failures. Pass a criterion number to run just that one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phasent/biphoton.hpp"
#include "phasent/camera.hpp"
#include "phasent/correlation.hpp"
#include "phasent/denoise.hpp"
#include "phasent/diagnostics.hpp"
#include "phasent/fitting.hpp"
#include "phasent/fourier_optics.hpp"
#include "phasent/jpd_recon.hpp"
#include "phasent/parallel.hpp"
#include "phasent/wavelet.hpp"

using namespace phasent;

namespace {

constexpr double um = 1e-6;
constexpr double mm = 1e-3;
constexpr double nm = 1e-9;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "" : "!") << what << "; ";
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

DGSource fold_source() { return {140.2 * um, 12.6 * um, 810 * nm}; }
DGSource slit_source() { return {326 * um, 9 * um, 810 * nm}; }

// ---------------------------------------------------------------------------

void closed_form_metrics(Outcome& out) {
  const DGSource a = fold_source();
  const DGSource b = slit_source();
  const double zp_a = z_phase(a), zp_b = z_phase(b);
  const double k_a = schmidt_number(a);
  out.check(std::abs(zp_a - 13.70 * mm) <= 0.05 * mm, "z_p=" + fmt(zp_a / mm) + "mm");
  out.check(std::abs(k_a - 31.5) <= 0.1, "K=" + fmt(k_a));
  out.check(std::abs(zp_b - 22.8 * mm) <= 0.1 * mm, "z_p'=" + fmt(zp_b / mm) + "mm");
  out.check(std::abs(zp_a - oracle::phase_distance(140.2 * um, 12.6 * um, 810 * nm)) < 1e-12, "oracle z_p");
}

void propagation_oracle(Outcome& out) {
  const DGSource src = fold_source();
  const double zp = z_phase(src);
  const Grid2 grid = propagation_grid(src, 2.0 * zp, 512);
  const ComplexField2D psi0 = eval_dg(src, grid, 0.0);
  for (double z : {0.5 * zp, zp, 2.0 * zp}) {
    const ComplexField2D num = fresnel_propagate_both(psi0, z, src.lambda());
    const ComplexField2D ref = eval_dg(src, grid, z);
    const double err = relative_l2_error_mod_phase(ref.values(), num.values());
    out.check(err < 1e-3, "z=" + fmt(z / zp) + "z_p err=" + fmt(err));
  }
}

void phase_plane_signature(Outcome& out) {
  const DGSource src = fold_source();
  const double zp = z_phase(src);
  const Grid2 grid = Grid2::square(256, required_half_extent(src, zp) * 1.5);
  const JPD2 rho = jpd_analytic(src, grid, zp);
  const double f = fedorov_from_jpd(rho);
  const JPD2 dg = delta_g2(rho);
  double worst = 0.0;
  for (double v : dg.values()) worst = std::max(worst, std::abs(v));
  const double rel = worst / rho.max_value();
  out.check(std::abs(f - 1.0) <= 1e-6, "F(z_p)=" + fmt(f));
  out.check(rel < 1e-10, "max|dG2|/max rho=" + fmt(rel));
  out.check(std::abs(fedorov_analytic(src, zp) - 1.0) < 1e-12, "analytic F(z_p)=1");
}

void folding_map(Outcome& out) {
  const DGSource src = fold_source();
  const double u = 60 * mm, f = 40 * mm;
  const LensFoldMap at3f = lens_fold_map(u, f, 3 * f);
  out.check(std::abs(at3f.z) < 1e-12, "z(3f)=" + fmt(at3f.z));

  const std::vector<double> zbars = zbar_grid(u, f, 400, &src);
  const std::vector<SweepResult> sweep = fedorov_sweep(src, u, f, zbars, SweepMode::analytic);
  std::vector<double> fed;
  for (const SweepResult& r : sweep) {
    if (!r.point) {
      out.check(false, "point failed: " + r.error);
      return;
    }
    fed.push_back(r.point->fedorov);
  }
  const auto it = std::min_element(fed.begin(), fed.end());
  const std::size_t imin = static_cast<std::size_t>(it - fed.begin());
  const double zbar_p = zbar_phase(src, u, f);
  const double zbar_o = oracle::zbar_for(u, f, -oracle::phase_distance(140.2 * um, 12.6 * um, 810 * nm));
  bool u_shape = true;
  for (std::size_t k = 1; k < fed.size(); ++k) {
    if (k <= imin) u_shape = u_shape && fed[k] <= fed[k - 1];
    else u_shape = u_shape && fed[k] >= fed[k - 1];
  }
  out.check(std::abs(fed.front() - 5.6) < 0.1, "F(first)=" + fmt(fed.front()));
  out.check(std::abs(fed.back() - 5.6) < 0.1, "F(3f)=" + fmt(fed.back()));
  out.check(std::abs(*it - 1.0) < 1e-9, "F_min=" + fmt(*it));
  out.check(std::abs(sweep[imin].zbar - zbar_p) < 1e-12 && std::abs(zbar_p - zbar_o) < 1e-9,
            "argmin zbar=" + fmt(sweep[imin].zbar / mm) + "mm");
  out.check(u_shape, "single interior minimum");
}

void estimator_round_trip(Outcome& out) {
  const DGSource src = fold_source();
  const double u = 60 * mm, f = 40 * mm;
  SweepSimulation sim;
  sim.camera.width = 64;
  sim.camera.height = 64;
  sim.camera.pitch = 16 * um;
  sim.camera.eta = 0.6;
  sim.camera.seed = 2024;
  sim.frames = 100000;
  sim.target_occupancy = 0.08;

  const LensFoldMap near = lens_fold_map(u, f, imaging_distance(u, f));
  const SweepPoint p0 = simulate_point(src, near, sim, 11);
  const double f0 = fedorov_analytic(src, 0.0);
  const double em = p0.sigma_fit_minus / src.sigma_minus() - 1.0;
  const double ep = p0.sigma_fit_plus / src.sigma_plus() - 1.0;
  out.check(std::abs(em) <= 0.1, "z=0 sigma-=" + fmt(p0.sigma_fit_minus / um) + "um");
  out.check(std::abs(ep) <= 0.1, "sigma+=" + fmt(p0.sigma_fit_plus / um) + "um");
  out.check(std::abs(p0.fedorov / f0 - 1.0) <= 0.1,
            "F=" + fmt(p0.fedorov) + " vs " + fmt(f0) + " (direct " + fmt(p0.fedorov_direct.value_or(NAN)) + ")");

  const LensFoldMap phase = lens_fold_map(u, f, zbar_phase(src, u, f));
  const SweepPoint pp = simulate_point(src, phase, sim, 12);
  out.check(pp.fedorov >= 0.85 && pp.fedorov <= 1.15,
            "F(z_p)=" + fmt(pp.fedorov) + " (direct " + fmt(pp.fedorov_direct.value_or(NAN)) + ")");
}

void bloom_fidelity(Outcome& out) {
  CameraModel cam;
  cam.width = 256;
  cam.height = 16;
  cam.pitch = 16 * um;
  cam.eta = 1.0;
  cam.bloom_prob = 0.3;
  cam.bloom_sigma = 1.9;
  cam.seed = 77;
  const double beam_px = 48.3;
  const GaussianPairSource source = GaussianPairSource::uncorrelated(beam_px * cam.pitch);
  cam.mu = mu_for_peak_occupancy(source, cam, 0.05);
  const FrameStack stack = render_frames(source, cam, 50000);
  const Roi roi{0, 0, cam.width, cam.height};
  GammaOptions go;
  go.eta = cam.eta;
  go.mu = cam.mu;
  const JPD2 rho = reduce_x(gamma_4d(stack, roi, go));

  const FitResultDG fit = fit_dg_2d(rho, DGFitOptions{.skip_main_diagonal = true});
  const double sm_px = fit.sigma_minus_fit / cam.pitch;
  const double beam_fit = std::sqrt(std::max(0.0, fit.sigma_plus_fit * fit.sigma_plus_fit -
                                                       fit.sigma_minus_fit * fit.sigma_minus_fit)) /
                          (2.0 * cam.pitch);
  out.check(std::abs(sm_px / 1.9 - 1.0) <= 0.1, "sigma_b fit=" + fmt(sm_px) + "px");
  out.check(std::abs(beam_fit / beam_px - 1.0) <= 0.1, "beam fit=" + fmt(beam_fit) + "px");

  const JPD2 base = bloom_baseline(rho, 1.9, beam_fit);
  const JPD2 cleaned = subtract_baseline(rho, base);
  auto ridge = [](const JPD2& m) {
    const LineProfile p = difference_profile(m, true);
    const double dx = m.grid().a1.dx;
    double worst = 0.0;
    for (std::size_t k = 0; k < p.coord.size(); ++k) {
      const double d = std::abs(p.coord[k] / dx);
      if (d >= 0.5 && d <= 3.0 * 1.9) worst = std::max(worst, std::abs(p.value[k]));
    }
    return worst;
  };
  const double before = ridge(rho), after = ridge(cleaned);
  out.check(before >= 10.0 * after, "ridge reduction=" + fmt(before / after) + "x");
}

void interference_dichotomy(Outcome& out) {
  const DGSource src = slit_source();
  const SlitSpec slit{400 * um, 150 * um};
  const double f3 = 125 * mm;
  const Grid2 grid = Grid2::square(1024, 1.5 * mm);
  auto at_slits = [&](const ComplexField2D& psi) { return relay_4f(psi, 75 * mm, 150 * mm); };
  const double period = src.lambda() * f3 / slit.d;
  out.check(std::abs(period - 253.125 * um) < 1e-9, "period=" + fmt(period / um) + "um");

  const JPD2 pos = interference_density(at_slits(eval_dg(src, grid, 0.0)), slit, f3, src.lambda());
  const std::vector<double> m_pos = marginal_g1(pos);
  const double v_pos = fringe_visibility(m_pos, pos.grid().a1, period);
  const double r_pos = ridge_correlation(delta_g2(pos), pos);
  out.check(v_pos < 0.05, "correlated V=" + fmt(v_pos));
  out.check(r_pos > 0.9, "ridge corr=" + fmt(r_pos));

  const JPD2 ph = interference_density(at_slits(eval_phase_state(src, grid)), slit, f3, src.lambda());
  const std::vector<double> m_ph = marginal_g1(ph);
  const double v_ph = fringe_visibility(m_ph, ph.grid().a1, period);
  const JPD2 dg = delta_g2(ph);
  double worst = 0.0;
  for (double v : dg.values()) worst = std::max(worst, std::abs(v));
  out.check(v_ph > 0.5, "phase V=" + fmt(v_ph));
  out.check(worst / ph.max_value() > 0.1, "max|dG2|/max rho=" + fmt(worst / ph.max_value()));
}

void numerical_hygiene(Outcome& out) {
  // Wavelet round trip on an odd-shaped random image.
  Rng rng = stream_rng(5, 0);
  std::normal_distribution<double> n01;
  Image img{37, 50, std::vector<double>(37 * 50)};
  for (double& v : img.data) v = n01(rng);
  const Image back = idwt2(dwt2(img, 3));
  double werr = 0.0;
  for (std::size_t k = 0; k < img.data.size(); ++k) werr = std::max(werr, std::abs(back.data[k] - img.data[k]));
  out.check(werr < 1e-12, "wavelet err=" + fmt(werr));

  double berr = 0.0;
  for (int n : {1, 3, 5})
    for (double fq = 0.001; fq <= 0.5; fq += 0.001)
      berr = std::max(berr, std::abs(butterworth_response(fq, 0.02, 0.3, n) - oracle::butterworth(fq, 0.02, 0.3, n)));
  out.check(berr < 1e-6, "Butterworth err=" + fmt(berr));

  Image noisy{64, 64, std::vector<double>(64 * 64)};
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 64; ++c) noisy(r, c) = (r > 20 && r < 44 && c > 16 ? 1.0 : 0.0) + 0.3 * n01(rng);
  std::vector<double> trace;
  tv_denoise(noisy, 0.2, 200, &trace);
  bool mono = true;
  for (std::size_t k = 1; k < trace.size(); ++k) mono = mono && trace[k] <= trace[k - 1] * (1.0 + 1e-12);
  out.check(mono, "TV objective monotone over " + std::to_string(trace.size()) + " iterations");

  const DGSource src = fold_source();
  CameraModel cam;
  cam.width = 32;
  cam.height = 32;
  cam.eta = 0.7;
  cam.bg_rate = 0.5;
  cam.bloom_prob = 0.2;
  cam.seed = 99;
  const GaussianPairSource pairs = GaussianPairSource::at_plane(src, 0.0, 2.0);
  cam.mu = mu_for_peak_occupancy(pairs, cam, 0.05);
  const Roi roi{0, 0, 32, 32};
  GammaOptions go;
  go.eta = cam.eta;
  go.mu = cam.mu;

  set_worker_count(1);
  const FrameStack s1 = render_frames(pairs, cam, 4000);
  const Gamma4 g1 = gamma_4d(s1, roi, go);
  const JPD2 r1 = reduce_x(g1);
  set_worker_count(4);
  const FrameStack s4 = render_frames(pairs, cam, 4000);
  const Gamma4 g4 = gamma_4d(s4, roi, go);
  const JPD2 r4 = reduce_x(g4);
  set_worker_count(0);

  double asym = 0.0;
  for (std::size_t i = 0; i < g1.pixels(); ++i)
    for (std::size_t j = 0; j < g1.pixels(); ++j) asym = std::max(asym, std::abs(g1(i, j) - g1(j, i)));
  const double rsym = symmetry_residual(r1);
  out.check(asym < 1e-12 && rsym < 1e-12, "Gamma asymmetry=" + fmt(asym) + " reduced=" + fmt(rsym));
  const bool same_bytes = std::equal(r1.values().begin(), r1.values().end(), r4.values().begin(),
                                     [](double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; });
  out.check(s1 == s4 && same_bytes, "thread-count determinism");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "closed-form metrics", closed_form_metrics},
      {2, "propagation oracle", propagation_oracle},
      {3, "phase-plane signature", phase_plane_signature},
      {4, "folding map and analytic sweep", folding_map},
      {5, "estimator round trip", estimator_round_trip},
      {6, "bloom fidelity", bloom_fidelity},
      {7, "interference dichotomy", interference_dichotomy},
      {8, "numerical hygiene", numerical_hygiene},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (const Criterion& c : all) {
    if (only != 0 && c.id != only) continue;
    Outcome out;
    WarningCapture quiet;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s (%.1fs): %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.str().c_str());
    for (const std::string& w : quiet.messages()) std::printf("    warning: %s\n", w.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures;
}
