#include "phasent/biphoton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phasent/errors.hpp"

namespace phasent {
namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

bool axis_covers(const Axis& a, double half_extent) {
  // Relative slack so that grids built with Axis::spanning(n, 4 sigma) pass.
  const double slack = 1e-9 * half_extent;
  return a.x0 <= -half_extent + slack && a.last() >= half_extent - slack;
}

}  // namespace

DGSource::DGSource(double sigma_plus, double sigma_minus, double lambda)
    : sigma_plus_(sigma_plus), sigma_minus_(sigma_minus), lambda_(lambda) {
  if (!positive_finite(sigma_plus) || !positive_finite(sigma_minus) || !positive_finite(lambda))
    throw DomainError("DG source needs positive sigma_plus, sigma_minus and lambda");
}

double sigma_minus_from_crystal(double crystal_length, double lambda_pump, double n_pump) {
  if (!positive_finite(crystal_length) || !positive_finite(lambda_pump) || !positive_finite(n_pump))
    throw DomainError("crystal length, pump wavelength and pump index must be positive");
  return std::sqrt(crystal_length * lambda_pump / (6.0 * std::numbers::pi * n_pump));
}

double schmidt_number(const DGSource& src) {
  const double r = src.sigma_plus() / src.sigma_minus();
  const double t = r + 1.0 / r;
  return 0.25 * t * t;
}

PropagatedWidths widths_at(const DGSource& src, double z) {
  if (!std::isfinite(z)) throw DomainError("propagation distance must be finite");
  const double k = src.k();
  const double sp = src.sigma_plus();
  const double sm = src.sigma_minus();
  const double dp = z / (k * sp);
  const double dm = z / (k * sm);
  return {z, std::sqrt(sp * sp + dp * dp), std::sqrt(sm * sm + dm * dm)};
}

double z_phase(const DGSource& src) { return src.k() * src.sigma_plus() * src.sigma_minus(); }

double fedorov_analytic(const DGSource& src, double z) {
  const PropagatedWidths w = widths_at(src, z);
  const double r = w.sigma_plus_z / w.sigma_minus_z;
  return 0.5 * (r + 1.0 / r);
}

double required_half_extent(const DGSource& src, double z) {
  const PropagatedWidths w = widths_at(src, z);
  return 4.0 * std::max(w.sigma_plus_z, w.sigma_minus_z);
}

ComplexField2D eval_dg(const DGSource& src, const Grid2& grid, double z) {
  grid.validate();
  const double need = required_half_extent(src, z);
  if (!axis_covers(grid.a1, need) || !axis_covers(grid.a2, need)) {
    std::ostringstream msg;
    msg << "grid too small for DG state at z=" << z << " m: need +-" << need << " m on both axes, have ["
        << grid.a1.x0 << ", " << grid.a1.last() << "] x [" << grid.a2.x0 << ", " << grid.a2.last() << "]";
    throw DomainError(msg.str());
  }
  const cplx iz_over_k{0.0, z / src.k()};
  const double sp = src.sigma_plus();
  const double sm = src.sigma_minus();
  const cplx a_minus = 1.0 / (4.0 * (iz_over_k + sm * sm));
  const cplx a_plus = 1.0 / (4.0 * (iz_over_k + sp * sp));

  std::vector<cplx> values(grid.size());
  for (std::size_t i = 0; i < grid.a1.n; ++i) {
    const double x1 = grid.a1.at(i);
    for (std::size_t j = 0; j < grid.a2.n; ++j) {
      const double x2 = grid.a2.at(j);
      const double d = x1 - x2;
      const double s = x1 + x2;
      values[grid.index(i, j)] = std::exp(-a_minus * (d * d) - a_plus * (s * s));
    }
  }
  return ComplexField2D(grid, std::move(values)).normalized();
}

ComplexField2D eval_phase_state(const DGSource& src, const Grid2& grid) { return eval_dg(src, grid, z_phase(src)); }

JPD2 jpd_analytic(const DGSource& src, const Grid2& grid, double z) {
  return JPD2::from_amplitude(eval_dg(src, grid, z));
}

Grid2 propagation_grid(const DGSource& src, double z, std::size_t n, double span_sigmas) {
  if (n < 2) throw DomainError("propagation grid needs n >= 2");
  const PropagatedWidths w0 = widths_at(src, 0.0);
  const PropagatedWidths wz = widths_at(src, z);
  const double widest = std::max({w0.sigma_plus_z, w0.sigma_minus_z, wz.sigma_plus_z, wz.sigma_minus_z});
  double half = std::max(span_sigmas, 4.0) * widest;
  // Transfer-function limit: dx >= sqrt(|z| lambda / n).
  const double dx_min = std::sqrt(std::abs(z) * src.lambda() / static_cast<double>(n));
  half = std::max(half, 0.5 * dx_min * static_cast<double>(n - 1) * (1.0 + 1e-9));
  return Grid2::square(n, half);
}

}  // namespace phasent
