#include "phasent/fourier_optics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "phasent/errors.hpp"
#include "phasent/fft.hpp"

namespace phasent {
namespace {

constexpr double pi = std::numbers::pi;

void check_axis(int axis) {
  if (axis != 1 && axis != 2) throw DomainError("axis must be 1 or 2");
}

std::vector<cplx> copy_values(const ComplexField2D& f) { return {f.values().begin(), f.values().end()}; }

}  // namespace

LensFoldMap lens_fold_map(double u, double f, double zbar) {
  if (!(f > 0.0) || !(u > 0.0)) throw DomainError("lens fold needs positive u and f");
  if (!(zbar > f)) {
    std::ostringstream msg;
    msg << "folded distance zbar=" << zbar << " m is outside (f, inf) with f=" << f << " m";
    throw DomainError(msg.str());
  }
  LensFoldMap m{};
  m.u = u;
  m.f = f;
  m.zbar = zbar;
  m.z = u - (zbar * f) / (zbar - f);
  m.s = 1.0 / (1.0 - zbar / f);
  m.c = 1.0 / (zbar - f);
  return m;
}

double zbar_for_z(double u, double f, double z) {
  const double w = u - z;
  if (!(w > f)) throw DomainError("propagation distance cannot be reached by the fold (need u - z > f)");
  return w * f / (w - f);
}

double imaging_distance(double u, double f) {
  if (!(u > f)) throw DomainError("no real image for u <= f");
  return u * f / (u - f);
}

void SlitSpec::validate() const {
  if (!(a > 0.0) || !(d > a)) throw DomainError("double slit needs d > a > 0");
}

double max_fresnel_distance(const Axis& axis, double lambda) {
  return axis.dx * axis.dx * static_cast<double>(axis.n) / lambda;
}

ComplexField2D fresnel_propagate(const ComplexField2D& field, int axis, double z, double lambda) {
  check_axis(axis);
  if (!(lambda > 0.0)) throw DomainError("wavelength must be positive");
  if (!std::isfinite(z)) throw DomainError("propagation distance must be finite");
  if (z == 0.0) return field;
  const Axis& ax = field.grid().axis(axis);
  const double zmax = max_fresnel_distance(ax, lambda);
  if (std::abs(z) > zmax) {
    std::ostringstream msg;
    msg << "Fresnel propagation by " << z << " m aliases the transfer function on this grid; maximum safe |z| is "
        << zmax << " m (dx^2 n / lambda)";
    throw DomainError(msg.str());
  }
  const std::size_t n1 = field.grid().a1.n;
  const std::size_t n2 = field.grid().a2.n;
  std::vector<cplx> data = copy_values(field);
  fft::along_axis(data, n1, n2, axis, fft::Direction::forward);

  std::vector<cplx> h(ax.n);
  for (std::size_t k = 0; k < ax.n; ++k) {
    const double nu = fft::frequency(k, ax.n, ax.dx);
    h[k] = std::polar(1.0, -pi * lambda * z * nu * nu);
  }
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) data[i * n2 + j] *= h[axis == 1 ? i : j];

  fft::along_axis(data, n1, n2, axis, fft::Direction::inverse);
  return {field.grid(), std::move(data)};
}

ComplexField2D fresnel_propagate_both(const ComplexField2D& field, double z, double lambda) {
  return fresnel_propagate(fresnel_propagate(field, 1, z, lambda), 2, z, lambda);
}

ComplexField2D quadratic_phase(const ComplexField2D& field, int axis, double c, double lambda) {
  check_axis(axis);
  if (!(lambda > 0.0)) throw DomainError("wavelength must be positive");
  if (c == 0.0) return field;
  const Grid2& g = field.grid();
  const Axis& ax = g.axis(axis);
  std::vector<cplx> phase(ax.n);
  for (std::size_t k = 0; k < ax.n; ++k) {
    const double x = ax.at(k);
    phase[k] = std::polar(1.0, pi * c * x * x / lambda);
  }
  std::vector<cplx> data = copy_values(field);
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j) data[g.index(i, j)] *= phase[axis == 1 ? i : j];
  return {g, std::move(data)};
}

ComplexField2D scale_field(const ComplexField2D& field, int axis, double s) {
  check_axis(axis);
  if (s == 0.0 || !std::isfinite(s)) throw DomainError("scale factor must be finite and non-zero");
  const Grid2& g = field.grid();
  Grid2 out_grid = g;
  Axis& ax = axis == 1 ? out_grid.a1 : out_grid.a2;
  const Axis& in = g.axis(axis);
  const double amp = std::sqrt(std::abs(s));
  // Sample i of the input sits at x_i; the output h(x) = sqrt|s| g(s x) has
  // that value at x_i / s.
  ax.dx = in.dx / std::abs(s);
  ax.x0 = (s > 0.0 ? in.x0 : in.last()) / s;

  std::vector<cplx> data(field.values().size());
  const bool flip = s < 0.0;
  for (std::size_t i = 0; i < g.a1.n; ++i) {
    for (std::size_t j = 0; j < g.a2.n; ++j) {
      std::size_t si = i;
      std::size_t sj = j;
      if (flip && axis == 1) si = g.a1.n - 1 - i;
      if (flip && axis == 2) sj = g.a2.n - 1 - j;
      data[out_grid.index(i, j)] = amp * field(si, sj);
    }
  }
  return {out_grid, std::move(data)};
}

ComplexField2D apply_fold(const ComplexField2D& field, const LensFoldMap& fold, double lambda) {
  ComplexField2D out = fresnel_propagate_both(field, fold.z, lambda);
  for (int axis : {1, 2}) {
    out = scale_field(out, axis, fold.s);
    out = quadratic_phase(out, axis, fold.c, lambda);
  }
  return out;
}

ComplexField2D lens_system(const ComplexField2D& field, double u, double f, double zbar, double lambda) {
  ComplexField2D out = fresnel_propagate_both(field, u, lambda);
  out = quadratic_phase(quadratic_phase(out, 1, -1.0 / f, lambda), 2, -1.0 / f, lambda);
  return fresnel_propagate_both(out, zbar, lambda);
}

ComplexField2D relay_4f(const ComplexField2D& field, double f1, double f2) {
  if (!(f1 > 0.0) || !(f2 > 0.0)) throw DomainError("4F relay needs positive focal lengths");
  // Magnification M = -f2/f1 corresponds to V[s] with s = 1/M.
  const double s = -f1 / f2;
  return scale_field(scale_field(field, 1, s), 2, s);
}

double double_slit_mask(double x, const SlitSpec& slit) {
  auto box = [](double t) { return std::abs(t) <= 0.5 ? 1.0 : 0.0; };
  return box((x - 0.5 * slit.d) / slit.a) + box((x + 0.5 * slit.d) / slit.a);
}

JPD2 interference_density(const ComplexField2D& psi_ds, const SlitSpec& slit, double f3, double lambda) {
  slit.validate();
  if (!(f3 > 0.0) || !(lambda > 0.0)) throw DomainError("interference needs positive f3 and lambda");
  const Grid2& g = psi_ds.grid();
  for (const Axis* a : {&g.a1, &g.a2}) {
    if (slit.a / a->dx < 8.0) {
      std::ostringstream msg;
      msg << "slit width " << slit.a << " m is sampled by only " << slit.a / a->dx << " samples (need >= 8)";
      throw DomainError(msg.str());
    }
    if (a->x0 > -0.5 * (slit.d + slit.a) || a->last() < 0.5 * (slit.d + slit.a))
      throw DomainError("input grid does not cover both slits");
  }
  std::vector<double> m1(g.a1.n), m2(g.a2.n);
  for (std::size_t i = 0; i < g.a1.n; ++i) m1[i] = double_slit_mask(g.a1.at(i), slit);
  for (std::size_t j = 0; j < g.a2.n; ++j) m2[j] = double_slit_mask(g.a2.at(j), slit);

  std::vector<cplx> data(g.size());
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j) data[g.index(i, j)] = m1[i] * m2[j] * psi_ds(i, j);

  fft::two_d(data, g.a1.n, g.a2.n, fft::Direction::forward);
  fft::shift_2d(data, g.a1.n, g.a2.n);

  auto far_axis = [&](const Axis& a) {
    const double dnu = 1.0 / (static_cast<double>(a.n) * a.dx);
    const double step = lambda * f3 * dnu;
    return Axis{a.n, -static_cast<double>(a.n / 2) * step, step};
  };
  const Grid2 out_grid{far_axis(g.a1), far_axis(g.a2)};
  std::vector<double> rho(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) rho[k] = std::norm(data[k]);
  return JPD2(out_grid, std::move(rho)).normalized();
}

}  // namespace phasent
