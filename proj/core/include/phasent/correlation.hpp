#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phasent/biphoton.hpp"
#include "phasent/camera.hpp"
#include "phasent/denoise.hpp"
#include "phasent/grid.hpp"
#include "phasent/jpd_recon.hpp"

namespace phasent {

/// ||rho - rho^T|| / ||rho||. Needs a square grid.
double symmetry_residual(const JPD2& jpd);

/// One-photon marginal over x1 (row sums), normalized to unit mass on a1.
/// Warns when the density is not exchange-symmetric (residual >= 0.05).
std::vector<double> marginal_g1(const JPD2& jpd);

/// rho(x1, x2) - G1(x1) G1(x2) / mass, with G1 the x1 and x2 marginals.
/// Sums to zero over the grid.
JPD2 delta_g2(const JPD2& jpd);

/// 2 |sum m(x) exp(-2 pi i x / period)| / sum m(x). Needs >= 4 samples per period.
double fringe_visibility(std::span<const double> marginal, const Axis& axis, double period);

/// Pearson correlation of two maps over the cells where `reference` is at
/// least band_fraction of its maximum.
double ridge_correlation(const JPD2& map, const JPD2& reference, double band_fraction = 0.01);

/// 0.5 (r + 1/r) with r = sigma_plus / sigma_minus.
double fedorov_from_widths(double sigma_plus, double sigma_minus);

enum class SweepMode { analytic, simulate };

struct SweepSimulation {
  CameraModel camera;
  std::size_t frames = 20000;
  std::optional<Roi> roi;            ///< default: centred 64 x 64 (clipped to the sensor)
  double target_occupancy = 0.05;    ///< 0 keeps camera.mu
  bool clean = true;
  CleanOptions clean_options{};
};

struct SweepPoint {
  double zbar = 0.0;
  double z = 0.0;
  double fedorov = 0.0;          ///< analytic, or from the fitted DG widths
  double sigma_fit_plus = 0.0;   ///< object-plane widths (detection widths / |magnification|)
  double sigma_fit_minus = 0.0;
  SweepMode source = SweepMode::analytic;
  std::optional<double> fedorov_direct;  ///< moment ratio on the cleaned, clipped density
};

struct SweepResult {
  double zbar = 0.0;
  std::optional<SweepPoint> point;
  std::string error;  ///< set when the point could not be evaluated
};

/// Fedorov ratio against folded detection distance. Out-of-domain zbar values
/// (outside (f, u f / (u - f)]) yield a per-point error and the sweep continues.
/// Results are ordered by zbar.
std::vector<SweepResult> fedorov_sweep(const DGSource& src, double u, double f, std::span<const double> zbars,
                                       SweepMode mode, const SweepSimulation* sim = nullptr);

/// One simulated sweep point at a folded distance.
SweepPoint simulate_point(const DGSource& src, const LensFoldMap& fold, const SweepSimulation& sim,
                          std::uint64_t seed);

/// Folded distance of the phase plane (z = -z_p).
double zbar_phase(const DGSource& src, double u, double f);

/// `count` evenly spaced zbar in (f, u f / (u - f)]. With snap_src, the point
/// nearest the folded phase plane is moved onto it.
std::vector<double> zbar_grid(double u, double f, std::size_t count, const DGSource* snap_src = nullptr);

}  // namespace phasent
