#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace phasent {

using cplx = std::complex<double>;

/// Uniform sampling of one transverse coordinate: x_i = x0 + i * dx.
struct Axis {
  std::size_t n = 0;
  double x0 = 0.0;
  double dx = 0.0;

  double at(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
  double last() const { return at(n - 1); }

  /// n samples centred on zero with the given pitch.
  static Axis centered(std::size_t n, double dx);
  /// n samples spanning [-half_extent, +half_extent] inclusive.
  static Axis spanning(std::size_t n, double half_extent);

  bool operator==(const Axis&) const = default;
};

/// Two-coordinate grid; axis 1 is the slow (row) index.
struct Grid2 {
  Axis a1;
  Axis a2;

  std::size_t size() const { return a1.n * a2.n; }
  std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * a2.n + i2; }
  const Axis& axis(int which) const { return which == 1 ? a1 : a2; }

  /// Throws DomainError unless n >= 2 and dx > 0 on both axes.
  void validate() const;

  static Grid2 square(std::size_t n, double half_extent) {
    const Axis a = Axis::spanning(n, half_extent);
    return {a, a};
  }

  bool operator==(const Grid2&) const = default;
};

/// Sampled two-photon amplitude Psi(x1, x2). Immutable once built.
class ComplexField2D {
 public:
  ComplexField2D(Grid2 grid, std::vector<cplx> values);

  const Grid2& grid() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  const cplx& operator()(std::size_t i1, std::size_t i2) const { return values_[grid_.index(i1, i2)]; }

  /// Sum |psi|^2 dx1 dx2.
  double norm2() const;
  ComplexField2D normalized() const;

 private:
  Grid2 grid_;
  std::vector<cplx> values_;
};

/// Real two-coordinate density rho(x1, x2). Analytic densities are
/// non-negative; reconstructed ones may carry negative noise which is
/// reported by negative_count() rather than clipped.
class JPD2 {
 public:
  JPD2(Grid2 grid, std::vector<double> values);

  const Grid2& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator()(std::size_t i1, std::size_t i2) const { return values_[grid_.index(i1, i2)]; }

  double sum() const;
  /// Sum rho dx1 dx2.
  double mass() const;
  std::size_t negative_count() const;
  double max_value() const;

  /// Rescaled so that mass() == 1. Throws DomainError for zero mass.
  JPD2 normalized() const;
  JPD2 clipped_nonnegative() const;
  JPD2 transposed() const;

  /// |psi|^2, normalized to unit mass.
  static JPD2 from_amplitude(const ComplexField2D& psi);

 private:
  Grid2 grid_;
  std::vector<double> values_;
};

/// ||a - b|| / ||a|| after removing the best global phase between the two.
double relative_l2_error_mod_phase(std::span<const cplx> reference, std::span<const cplx> candidate);

}  // namespace phasent
