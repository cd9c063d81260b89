#include "phasent/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "phasent/errors.hpp"

namespace phasent {

Axis Axis::centered(std::size_t n, double dx) {
  return {n, -0.5 * static_cast<double>(n - 1) * dx, dx};
}

Axis Axis::spanning(std::size_t n, double half_extent) {
  if (n < 2) throw DomainError("axis needs at least 2 samples");
  return {n, -half_extent, 2.0 * half_extent / static_cast<double>(n - 1)};
}

void Grid2::validate() const {
  for (const Axis* a : {&a1, &a2}) {
    if (a->n < 2) throw DomainError("grid axis needs n >= 2, got " + std::to_string(a->n));
    if (!(a->dx > 0.0) || !std::isfinite(a->dx)) throw DomainError("grid pitch must be positive and finite");
    if (!std::isfinite(a->x0)) throw DomainError("grid origin must be finite");
  }
}

ComplexField2D::ComplexField2D(Grid2 grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size())
    throw DomainError("field has " + std::to_string(values_.size()) + " values for a " +
                      std::to_string(grid_.a1.n) + "x" + std::to_string(grid_.a2.n) + " grid");
}

double ComplexField2D::norm2() const {
  double s = 0.0;
  for (const cplx& v : values_) s += std::norm(v);
  return s * grid_.a1.dx * grid_.a2.dx;
}

ComplexField2D ComplexField2D::normalized() const {
  const double n2 = norm2();
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw DomainError("cannot normalize a field with zero or non-finite norm");
  const double scale = 1.0 / std::sqrt(n2);
  std::vector<cplx> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [scale](cplx v) { return v * scale; });
  return {grid_, std::move(out)};
}

JPD2::JPD2(Grid2 grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size())
    throw DomainError("density has " + std::to_string(values_.size()) + " values for a " +
                      std::to_string(grid_.a1.n) + "x" + std::to_string(grid_.a2.n) + " grid");
}

double JPD2::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double JPD2::mass() const { return sum() * grid_.a1.dx * grid_.a2.dx; }

std::size_t JPD2::negative_count() const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return v < 0.0; }));
}

double JPD2::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

JPD2 JPD2::normalized() const {
  const double m = mass();
  if (m == 0.0 || !std::isfinite(m)) throw DomainError("cannot normalize a density with zero or non-finite mass");
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [m](double v) { return v / m; });
  return {grid_, std::move(out)};
}

JPD2 JPD2::clipped_nonnegative() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](double v) { return std::max(v, 0.0); });
  return {grid_, std::move(out)};
}

JPD2 JPD2::transposed() const {
  const Grid2 g{grid_.a2, grid_.a1};
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < grid_.a1.n; ++i)
    for (std::size_t j = 0; j < grid_.a2.n; ++j) out[g.index(j, i)] = values_[grid_.index(i, j)];
  return {g, std::move(out)};
}

JPD2 JPD2::from_amplitude(const ComplexField2D& psi) {
  std::vector<double> rho(psi.values().size());
  std::transform(psi.values().begin(), psi.values().end(), rho.begin(), [](cplx v) { return std::norm(v); });
  return JPD2(psi.grid(), std::move(rho)).normalized();
}

double relative_l2_error_mod_phase(std::span<const cplx> reference, std::span<const cplx> candidate) {
  if (reference.size() != candidate.size()) throw DomainError("size mismatch in field comparison");
  cplx overlap{0.0, 0.0};
  double ref2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    overlap += std::conj(candidate[i]) * reference[i];
    ref2 += std::norm(reference[i]);
  }
  if (ref2 == 0.0) throw DomainError("reference field is zero");
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0, 0.0};
  double err2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) err2 += std::norm(reference[i] - phase * candidate[i]);
  return std::sqrt(err2 / ref2);
}

}  // namespace phasent
