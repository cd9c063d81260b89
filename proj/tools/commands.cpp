#include "commands.hpp"

#include <algorithm>
#include <cmath>

#include "grid_io.hpp"
#include "phasent/biphoton.hpp"
#include "phasent/camera.hpp"
#include "phasent/denoise.hpp"
#include "phasent/diagnostics.hpp"
#include "phasent/errors.hpp"
#include "phasent/fitting.hpp"
#include "phasent/fourier_optics.hpp"
#include "phasent/frame_io.hpp"
#include "phasent/jpd_recon.hpp"

namespace phasent::cli {
namespace {

constexpr double um = 1e-6;
constexpr double mm = 1e-3;

/// Shared per-command setup: output directory, provenance, effective config.
struct Session {
  const Invocation& inv;
  std::filesystem::path dir;
  Provenance prov;

  Session(const Invocation& i, std::string command) : inv(i), dir(i.config.output) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const std::string text = to_text(inv.config);
    prov = {std::move(command) + (inv.command_line.empty() ? "" : " [" + inv.command_line + "]"), fnv1a64(text),
            inv.config.camera.seed};
    write_text(dir / "config.effective.ini", "# " + prov.line() + "\n" + text);
  }

  std::filesystem::path operator/(const std::string& name) const { return dir / name; }

  Summary finish(Summary summary, const std::string& report, const WarningCapture& warnings) const {
    for (const std::string& w : warnings.messages()) summary.emplace_back("warning", w);
    write_report(dir / report, prov, summary);
    return summary;
  }
};

double resolve_z(const RunConfig& c, const Plane& plane, double fallback) {
  if (plane.zbar) return lens_fold_map(c.u, c.f, *plane.zbar).z;
  return plane.z.value_or(fallback);
}

void require_resolved(double width, double dx, const char* what) {
  if (width / dx < 2.0)
    throw DomainError(std::string(what) + " is sampled by " + fmt(width / dx, 3) +
                      " grid steps (need >= 2); raise run.grid");
}

}  // namespace

Summary cmd_state(const Invocation& inv, const Plane& plane) {
  Session s(inv, "state");
  WarningCapture warnings;
  const RunConfig& c = inv.config;
  const DGSource src = c.source();
  const double z = resolve_z(c, plane, 0.0);
  const PropagatedWidths w = widths_at(src, z);
  const Grid2 grid = Grid2::square(c.grid, 1.5 * required_half_extent(src, z));
  require_resolved(std::min(w.sigma_plus_z, w.sigma_minus_z), grid.a1.dx, "the narrower width");
  const ComplexField2D psi = eval_dg(src, grid, z);
  const JPD2 rho = JPD2::from_amplitude(psi);
  write_grid(psi, s / "amplitude.bpg");
  write_grid(rho, s / "jpd.bpg");
  write_pgm16(s / "jpd.pgm", s.prov, rho);
  Summary out = {
      {"z_mm", fmt(z / mm)},
      {"z_phase_mm", fmt(z_phase(src) / mm)},
      {"zbar_phase_mm", fmt(zbar_phase(src, c.u, c.f) / mm)},
      {"schmidt", fmt(schmidt_number(src))},
      {"fedorov", fmt(fedorov_analytic(src, z))},
      {"sigma_plus_um", fmt(w.sigma_plus_z / um)},
      {"sigma_minus_um", fmt(w.sigma_minus_z / um)},
      {"grid_half_extent_um", fmt(grid.a1.last() / um)},
  };
  return s.finish(std::move(out), "state_report.txt", warnings);
}

Summary cmd_simulate(const Invocation& inv, const Plane& plane) {
  Session s(inv, "simulate");
  WarningCapture warnings;
  const RunConfig& c = inv.config;
  const DGSource src = c.source();
  const double zbar = plane.zbar.value_or(plane.z ? zbar_for_z(c.u, c.f, *plane.z) : imaging_distance(c.u, c.f));
  const LensFoldMap fold = lens_fold_map(c.u, c.f, zbar);
  const GaussianPairSource pairs = GaussianPairSource::folded(src, fold);
  CameraModel cam = c.camera;
  if (cam.mu == 0.0) cam.mu = mu_for_peak_occupancy(pairs, cam, c.target_occupancy);
  const FrameStack stack = render_frames(pairs, cam, c.frames);
  write_stack(stack, s / "stack.bpf");
  const std::vector<double> occ = stack.mean_occupancy();
  Summary out = {
      {"zbar_mm", fmt(zbar / mm)},
      {"z_mm", fmt(fold.z / mm)},
      {"magnification", fmt(fold.magnification())},
      {"mu", fmt(cam.mu, 9)},
      {"frames", std::to_string(stack.frames())},
      {"total_counts", std::to_string(stack.total_counts())},
      {"peak_occupancy", fmt(*std::max_element(occ.begin(), occ.end()))},
      {"sum_width_px", fmt(pairs.sigma_sum() / cam.pitch)},
      {"difference_width_px", fmt(pairs.sigma_diff() / cam.pitch)},
  };
  return s.finish(std::move(out), "simulate_report.txt", warnings);
}

Profile parse_profile(const std::string& name) {
  if (name == "none") return Profile::none;
  if (name == "propagation") return Profile::propagation;
  if (name == "interference") return Profile::interference;
  throw DomainError("unknown profile '" + name + "' (none, propagation, interference)");
}

Summary cmd_reconstruct(const Invocation& inv, const std::filesystem::path& stack_path, Profile profile,
                        const Plane& plane) {
  Session s(inv, "reconstruct");
  WarningCapture warnings;
  const RunConfig& c = inv.config;
  const FrameStack stack = read_stack(stack_path);
  RunConfig sized = c;
  sized.camera.width = stack.width();
  sized.camera.height = stack.height();
  const Roi roi = sized.effective_roi();
  GammaOptions go;
  go.eta = c.camera.eta;
  go.mu = c.camera.mu;
  if (go.mu == 0.0) {
    go.mu = 1.0;
    warn("camera.mu = 0: Gamma is reported per unit pair rate (widths and Fedorov ratio are unaffected)");
  }
  const Gamma4 gamma = gamma_4d(stack, roi, go);
  const JPD2 raw = reduce_x(gamma);
  write_grid(raw, s / "jpd_raw.bpg");
  write_pgm16(s / "jpd_raw.pgm", s.prov, raw);
  Summary out = {
      {"frames", std::to_string(stack.frames())},
      {"roi", std::to_string(roi.x) + "," + std::to_string(roi.y) + "," + std::to_string(roi.w) + "," +
                  std::to_string(roi.h)},
      {"clamped_entries", std::to_string(gamma.clamped_count())},
  };
  JPD2 cleaned = raw;
  if (profile != Profile::none) {
    CleanOptions co;
    if (c.camera.bloom_prob <= 0.0) co.subtract_bloom = false;
    co.sigma_b = c.camera.bloom_sigma;
    const CleanResult res = clean_pipeline(
        raw, profile == Profile::propagation ? CleanProfile::propagation : CleanProfile::interference, co);
    cleaned = res.density;
    std::vector<std::vector<std::string>> rows;
    for (const StageReport& st : res.stages) rows.push_back({st.stage, fmt(st.mass_before, 9), fmt(st.mass_after, 9)});
    write_csv(s / "stages.csv", s.prov, {"stage", "mass_before", "mass_after"}, rows);
    write_grid(cleaned, s / "jpd_clean.bpg");
    write_pgm16(s / "jpd_clean.pgm", s.prov, cleaned);
  }
  out.emplace_back("negative_cells", std::to_string(cleaned.negative_count()));
  const FitResultDG fit = fit_dg_2d(cleaned, DGFitOptions{.skip_main_diagonal = true});
  const double px = stack.pitch();
  out.emplace_back("fit_converged", fit.converged ? "true" : "false");
  out.emplace_back("sigma_plus_px", fmt(fit.sigma_plus_fit / px));
  out.emplace_back("sigma_minus_px", fmt(fit.sigma_minus_fit / px));
  out.emplace_back("fedorov_fit", fmt(fedorov_from_widths(fit.sigma_plus_fit, fit.sigma_minus_fit)));
  try {
    out.emplace_back("fedorov_direct", fmt(fedorov_from_jpd(cleaned, FedorovOptions{.clip_negative = true})));
  } catch (const DomainError& e) {
    out.emplace_back("fedorov_direct", std::string("n/a (") + e.what() + ")");
  }
  if (plane.zbar || plane.z) {
    const double zbar = plane.zbar.value_or(plane.z ? zbar_for_z(c.u, c.f, *plane.z) : 0.0);
    const double mag = std::abs(lens_fold_map(c.u, c.f, zbar).magnification());
    out.emplace_back("sigma_plus_object_um", fmt(fit.sigma_plus_fit / mag / um));
    out.emplace_back("sigma_minus_object_um", fmt(fit.sigma_minus_fit / mag / um));
  }
  return s.finish(std::move(out), "reconstruct_report.txt", warnings);
}

SweepMode parse_mode(const std::string& name) {
  if (name == "analytic") return SweepMode::analytic;
  if (name == "simulate") return SweepMode::simulate;
  throw DomainError("unknown sweep mode '" + name + "' (analytic, simulate)");
}

Summary cmd_sweep(const Invocation& inv, std::vector<double> zbars, std::size_t count, SweepMode mode) {
  Session s(inv, "sweep");
  WarningCapture warnings;
  const RunConfig& c = inv.config;
  const DGSource src = c.source();
  if (zbars.empty()) zbars = zbar_grid(c.u, c.f, count, &src);
  SweepSimulation sim;
  sim.camera = c.camera;
  sim.frames = c.frames;
  sim.roi = c.roi;
  sim.target_occupancy = c.camera.mu > 0.0 ? 0.0 : c.target_occupancy;
  const std::vector<SweepResult> results = fedorov_sweep(src, c.u, c.f, zbars, mode, &sim);

  std::vector<std::vector<std::string>> rows, errors;
  const SweepPoint* best = nullptr;
  for (const SweepResult& r : results) {
    if (!r.point) {
      errors.push_back({fmt(r.zbar / mm, 9), "\"" + r.error + "\""});
      continue;
    }
    const SweepPoint& p = *r.point;
    rows.push_back({fmt(p.zbar / mm, 9), fmt(p.z / mm, 9), fmt(p.fedorov, 9), fmt(p.sigma_fit_plus / um, 7),
                    fmt(p.sigma_fit_minus / um, 7), mode == SweepMode::analytic ? "analytic" : "simulate"});
    if (!best || p.fedorov < best->fedorov) best = &p;
  }
  write_csv(s / "sweep.csv", s.prov, {"zbar_mm", "z_mm", "fedorov", "sigma_plus_um", "sigma_minus_um", "mode"}, rows);
  write_csv(s / "sweep_errors.csv", s.prov, {"zbar_mm", "error"}, errors);
  Summary out = {
      {"points", std::to_string(rows.size())},
      {"failed_points", std::to_string(errors.size())},
      {"zbar_phase_mm", fmt(zbar_phase(src, c.u, c.f) / mm)},
  };
  if (best) {
    out.emplace_back("min_fedorov", fmt(best->fedorov, 9));
    out.emplace_back("min_at_zbar_mm", fmt(best->zbar / mm));
  }
  return s.finish(std::move(out), "sweep_report.txt", warnings);
}

InputState parse_state(const std::string& name) {
  if (name == "position") return InputState::position;
  if (name == "phase") return InputState::phase;
  throw DomainError("unknown state '" + name + "' (position, phase)");
}

Summary cmd_interfere(const Invocation& inv, InputState state) {
  Session s(inv, "interfere");
  WarningCapture warnings;
  const RunConfig& c = inv.config;
  const DGSource src = c.source();
  const double z = state == InputState::phase ? z_phase(src) : 0.0;
  const PropagatedWidths w = widths_at(src, z);
  const double mag = c.relay_f2 / c.relay_f1;
  // The grid serves both the source plane and the relayed field at the slits.
  const double photon = 0.5 * std::hypot(w.sigma_plus_z, w.sigma_minus_z);
  const double half = std::max({required_half_extent(src, z), 4.0 * mag * photon, 0.55 * (c.slit.d + c.slit.a)});
  const Grid2 grid = Grid2::square(c.grid, half);
  require_resolved(std::min(w.sigma_plus_z, w.sigma_minus_z), grid.a1.dx, "the narrower source width");

  const ComplexField2D at_slits = relay_4f(eval_dg(src, grid, z), c.relay_f1, c.relay_f2);
  const JPD2 rho = interference_density(at_slits, c.slit, c.f3, src.lambda());
  const std::vector<double> g1 = marginal_g1(rho);
  const JPD2 dg = delta_g2(rho);
  std::vector<double> product(rho.grid().size());
  for (std::size_t i = 0; i < g1.size(); ++i)
    for (std::size_t j = 0; j < g1.size(); ++j) product[rho.grid().index(i, j)] = g1[i] * g1[j];
  const JPD2 marginals(rho.grid(), std::move(product));

  write_grid(rho, s / "density.bpg");
  write_grid(marginals, s / "marginal_product.bpg");
  write_grid(dg, s / "delta_g2.bpg");
  write_pgm16(s / "density.pgm", s.prov, rho);
  write_pgm16(s / "marginal_product.pgm", s.prov, marginals);
  write_pgm16(s / "delta_g2.pgm", s.prov, dg);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < g1.size(); ++i) rows.push_back({fmt(rho.grid().a1.at(i) / um, 9), fmt(g1[i], 9)});
  write_csv(s / "marginal.csv", s.prov, {"x_um", "g1_per_m"}, rows);

  const double period = src.lambda() * c.f3 / c.slit.d;
  double worst = 0.0;
  for (double v : dg.values()) worst = std::max(worst, std::abs(v));
  Summary out = {
      {"state", state == InputState::phase ? "phase" : "position"},
      {"z_mm", fmt(z / mm)},
      {"fringe_period_um", fmt(period / um)},
      {"visibility", fmt(fringe_visibility(g1, rho.grid().a1, period))},
      {"delta_g2_ratio", fmt(worst / rho.max_value())},
      {"ridge_correlation", fmt(ridge_correlation(dg, rho))},
  };
  return s.finish(std::move(out), "interfere_report.txt", warnings);
}

}  // namespace phasent::cli
