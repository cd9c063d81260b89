#pragma once

#include <numbers>

#include "phasent/grid.hpp"

namespace phasent {

/// Double-Gaussian biphoton source. sigma_plus is the width of the sum
/// coordinate x1 + x2 (pump-limited), sigma_minus the width of the difference
/// coordinate x1 - x2 (phase-matching-limited). All lengths in metres.
class DGSource {
 public:
  /// Throws DomainError unless all three are positive and finite.
  DGSource(double sigma_plus, double sigma_minus, double lambda);

  double sigma_plus() const { return sigma_plus_; }
  double sigma_minus() const { return sigma_minus_; }
  double lambda() const { return lambda_; }
  double k() const { return 2.0 * std::numbers::pi / lambda_; }

 private:
  double sigma_plus_;
  double sigma_minus_;
  double lambda_;
};

struct PropagatedWidths {
  double z;
  double sigma_plus_z;
  double sigma_minus_z;
};

/// sqrt(L * lambda_pump / (6 pi n_pump)).
double sigma_minus_from_crystal(double crystal_length, double lambda_pump, double n_pump);

/// K = (sigma+/sigma- + sigma-/sigma+)^2 / 4.
double schmidt_number(const DGSource& src);

/// sigma(z)^2 = sigma^2 + (z / (k sigma))^2 for both widths. Even in z.
PropagatedWidths widths_at(const DGSource& src, double z);

/// Positive distance k sigma+ sigma- at which the two propagated widths cross.
double z_phase(const DGSource& src);

/// (sigma+(z)/sigma-(z) + sigma-(z)/sigma+(z)) / 2.
double fedorov_analytic(const DGSource& src, double z);

/// Closed-form propagated amplitude
///   exp(-(x1-x2)^2 / (4(iz/k + s-^2)) - (x1+x2)^2 / (4(iz/k + s+^2)))
/// sampled on `grid` and renormalized numerically. The normalization
/// constant (and its phase) is not applied, so the phase vanishes at x1 = x2 = 0.
/// Throws DomainError when the grid does not reach +-4 max(sigma+(z), sigma-(z))
/// on both axes.
ComplexField2D eval_dg(const DGSource& src, const Grid2& grid, double z);

/// eval_dg at z = z_phase(src).
ComplexField2D eval_phase_state(const DGSource& src, const Grid2& grid);

/// |eval_dg|^2, unit mass.
JPD2 jpd_analytic(const DGSource& src, const Grid2& grid, double z);

/// Required half extent for eval_dg at z (4 max width).
double required_half_extent(const DGSource& src, double z);

/// Square n x n grid wide enough for eval_dg at both 0 and z, covering
/// at least +-span_sigmas * max width, and widened further if needed so that
/// Fresnel propagation over |z| stays inside the transfer-function sampling
/// limit |z| <= dx^2 n / lambda.
Grid2 propagation_grid(const DGSource& src, double z, std::size_t n, double span_sigmas = 6.0);

}  // namespace phasent
