#include "phasent/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "phasent/diagnostics.hpp"
#include "phasent/errors.hpp"
#include "phasent/fitting.hpp"
#include "phasent/fourier_optics.hpp"

namespace phasent {

double symmetry_residual(const JPD2& jpd) {
  const Grid2& g = jpd.grid();
  if (g.a1.n != g.a2.n) throw DomainError("symmetry needs a square grid");
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j) {
      const double d = jpd(i, j) - jpd(j, i);
      diff += d * d;
      norm += jpd(i, j) * jpd(i, j);
    }
  if (!(norm > 0.0)) return 0.0;
  return std::sqrt(diff / norm);
}

std::vector<double> marginal_g1(const JPD2& jpd) {
  const Grid2& g = jpd.grid();
  if (g.a1.n == g.a2.n) {
    const double r = symmetry_residual(jpd);
    if (r >= 0.05) {
      std::ostringstream msg;
      msg << "density is not exchange-symmetric (residual " << r << "); the x1 marginal is not the x2 marginal";
      warn(msg.str());
    }
  } else {
    warn("density grid is not square; marginal taken over x1");
  }
  std::vector<double> m(g.a1.n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < g.a1.n; ++i) {
    for (std::size_t j = 0; j < g.a2.n; ++j) m[i] += jpd(i, j);
    total += m[i];
  }
  if (total == 0.0) throw DomainError("marginal of a zero density");
  const double scale = 1.0 / (total * g.a1.dx);
  for (double& v : m) v *= scale;
  return m;
}

JPD2 delta_g2(const JPD2& jpd) {
  const Grid2& g = jpd.grid();
  std::vector<double> m1(g.a1.n, 0.0), m2(g.a2.n, 0.0);
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j) {
      m1[i] += jpd(i, j) * g.a2.dx;
      m2[j] += jpd(i, j) * g.a1.dx;
    }
  const double mass = jpd.mass();
  if (mass == 0.0) throw DomainError("delta G2 of a zero density");
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j) out[g.index(i, j)] = jpd(i, j) - m1[i] * m2[j] / mass;
  return {g, std::move(out)};
}

double fringe_visibility(std::span<const double> marginal, const Axis& axis, double period) {
  if (marginal.size() != axis.n) throw DomainError("marginal length does not match its axis");
  if (!(period > 0.0) || period / axis.dx < 4.0) {
    std::ostringstream msg;
    msg << "period " << period << " is resolved by " << period / axis.dx << " samples (need >= 4)";
    throw DomainError(msg.str());
  }
  std::complex<double> acc{0.0, 0.0};
  double total = 0.0;
  for (std::size_t i = 0; i < marginal.size(); ++i) {
    acc += marginal[i] * std::polar(1.0, -2.0 * std::numbers::pi * axis.at(i) / period);
    total += marginal[i];
  }
  if (!(total > 0.0)) throw DomainError("visibility needs a positive marginal");
  return 2.0 * std::abs(acc) / total;
}

double ridge_correlation(const JPD2& map, const JPD2& reference, double band_fraction) {
  if (!(map.grid() == reference.grid())) throw DomainError("maps live on different grids");
  const double cut = band_fraction * reference.max_value();
  double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < map.values().size(); ++k) {
    const double b = reference.values()[k];
    if (b < cut) continue;
    const double a = map.values()[k];
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
    ++n;
  }
  if (n < 2) throw DomainError("ridge band holds fewer than 2 cells");
  const double nn = static_cast<double>(n);
  const double cov = sab - sa * sb / nn;
  const double va = saa - sa * sa / nn;
  const double vb = sbb - sb * sb / nn;
  if (!(va > 0.0) || !(vb > 0.0)) throw DomainError("ridge band has no variance");
  return cov / std::sqrt(va * vb);
}

double fedorov_from_widths(double sigma_plus, double sigma_minus) {
  if (!(sigma_plus > 0.0) || !(sigma_minus > 0.0)) throw DomainError("widths must be positive");
  const double r = sigma_plus / sigma_minus;
  return 0.5 * (r + 1.0 / r);
}

double zbar_phase(const DGSource& src, double u, double f) { return zbar_for_z(u, f, -z_phase(src)); }

std::vector<double> zbar_grid(double u, double f, std::size_t count, const DGSource* snap_src) {
  if (count < 1) throw DomainError("zbar grid needs at least one point");
  const double top = imaging_distance(u, f);
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = f + (top - f) * static_cast<double>(k + 1) / static_cast<double>(count);
  if (snap_src) {
    const double zp = zbar_phase(*snap_src, u, f);
    auto nearest = std::min_element(out.begin(), out.end(),
                                    [zp](double a, double b) { return std::abs(a - zp) < std::abs(b - zp); });
    *nearest = zp;
  }
  return out;
}

SweepPoint simulate_point(const DGSource& src, const LensFoldMap& fold, const SweepSimulation& sim,
                          std::uint64_t seed) {
  const GaussianPairSource pairs = GaussianPairSource::folded(src, fold);
  CameraModel cam = sim.camera;
  cam.seed = seed;
  if (sim.target_occupancy > 0.0) cam.mu = mu_for_peak_occupancy(pairs, cam, sim.target_occupancy);
  Roi roi = sim.roi.value_or(Roi{cam.width > 64 ? (cam.width - 64) / 2 : 0, cam.height > 64 ? (cam.height - 64) / 2 : 0,
                                 std::min<std::size_t>(cam.width, 64), std::min<std::size_t>(cam.height, 64)});
  const FrameStack stack = render_frames(pairs, cam, sim.frames);
  GammaOptions go;
  go.eta = cam.eta > 0.0 ? cam.eta : 1.0;
  go.mu = cam.mu > 0.0 ? cam.mu : 1.0;
  const JPD2 rho = reduce_x(gamma_4d(stack, roi, go));
  JPD2 cleaned = rho;
  if (sim.clean) {
    CleanOptions co = sim.clean_options;
    if (cam.bloom_prob <= 0.0) co.subtract_bloom = false;
    cleaned = clean_pipeline(rho, CleanProfile::propagation, co).density;
  }
  const FitResultDG fit = fit_dg_2d(cleaned, DGFitOptions{.skip_main_diagonal = true});
  const double mag = std::abs(fold.magnification());
  SweepPoint p;
  p.zbar = fold.zbar;
  p.z = fold.z;
  p.source = SweepMode::simulate;
  p.sigma_fit_plus = fit.sigma_plus_fit / mag;
  p.sigma_fit_minus = fit.sigma_minus_fit / mag;
  p.fedorov = fedorov_from_widths(fit.sigma_plus_fit, fit.sigma_minus_fit);
  try {
    p.fedorov_direct = fedorov_from_jpd(cleaned, FedorovOptions{.clip_negative = true});
  } catch (const DomainError&) {
    p.fedorov_direct.reset();
  }
  return p;
}

std::vector<SweepResult> fedorov_sweep(const DGSource& src, double u, double f, std::span<const double> zbars,
                                       SweepMode mode, const SweepSimulation* sim) {
  if (mode == SweepMode::simulate && !sim) throw DomainError("simulate sweep needs camera settings");
  std::vector<double> order(zbars.begin(), zbars.end());
  std::stable_sort(order.begin(), order.end());
  const double top = imaging_distance(u, f);
  std::vector<SweepResult> out;
  out.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    SweepResult r;
    r.zbar = order[k];
    try {
      if (!(order[k] <= top * (1.0 + 1e-12)))
        throw DomainError("zbar beyond the imaging plane maps to z > 0");
      const LensFoldMap fold = lens_fold_map(u, f, order[k]);
      if (mode == SweepMode::analytic) {
        const PropagatedWidths w = widths_at(src, fold.z);
        SweepPoint p;
        p.zbar = fold.zbar;
        p.z = fold.z;
        p.fedorov = fedorov_analytic(src, fold.z);
        p.sigma_fit_plus = w.sigma_plus_z;
        p.sigma_fit_minus = w.sigma_minus_z;
        p.source = SweepMode::analytic;
        r.point = p;
      } else {
        r.point = simulate_point(src, fold, *sim, sim->camera.seed + 1000003ULL * k);
      }
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace phasent
