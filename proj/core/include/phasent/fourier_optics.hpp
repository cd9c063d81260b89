#pragma once

#include "phasent/grid.hpp"

namespace phasent {

/// Single-lens folding of the propagation axis. A field a distance u in front
/// of a thin lens of focal length f, observed zbar behind it, equals the field
/// propagated by z, rescaled by s and multiplied by a quadratic phase of
/// curvature c:
///   z = u - zbar f / (zbar - f),  s = 1 / (1 - zbar / f),  c = 1 / (zbar - f).
struct LensFoldMap {
  double u;
  double f;
  double zbar;
  double z;
  double s;
  double c;

  /// Transverse magnification from object to detection plane (1 / s).
  double magnification() const { return 1.0 / s; }
};

/// Throws DomainError when zbar <= f.
LensFoldMap lens_fold_map(double u, double f, double zbar);

/// Detection distance zbar at which the fold reproduces propagation distance z
/// (z < u). Inverse of lens_fold_map(...).z.
double zbar_for_z(double u, double f, double z);

/// Imaging plane zbar = u f / (u - f), where z = 0.
double imaging_distance(double u, double f);

struct SlitSpec {
  double d;  ///< centre-to-centre separation
  double a;  ///< slit width

  /// Throws DomainError unless d > a > 0.
  void validate() const;
};

/// Largest |z| for which the paraxial transfer function stays sampled on this
/// axis: dx^2 n / lambda.
double max_fresnel_distance(const Axis& axis, double lambda);

/// Paraxial Fresnel propagation along one coordinate using the transfer
/// function H(nu) = exp(-i pi lambda z nu^2). The exp(ikz) and 1/sqrt(i lambda z)
/// factors are dropped. Throws DomainError naming the safe limit if
/// |z| > max_fresnel_distance.
ComplexField2D fresnel_propagate(const ComplexField2D& field, int axis, double z, double lambda);

/// Same distance along both coordinates.
ComplexField2D fresnel_propagate_both(const ComplexField2D& field, double z, double lambda);

/// Multiply by exp(i pi c x^2 / lambda) along one coordinate.
ComplexField2D quadratic_phase(const ComplexField2D& field, int axis, double c, double lambda);

/// sqrt|s| g(s x) along one coordinate, realized by rescaling the axis
/// calibration (dx -> dx/|s|) and reversing sample order for s < 0.
/// Preserves the L2 norm. Throws DomainError for s == 0.
ComplexField2D scale_field(const ComplexField2D& field, int axis, double s);

/// Composite fold Q[c] V[s] R[z] applied to both coordinates.
ComplexField2D apply_fold(const ComplexField2D& field, const LensFoldMap& fold, double lambda);

/// Explicit lens system R[zbar] Q[-1/f] R[u] applied to both coordinates.
/// Independent route to apply_fold; needs a grid that samples the lens chirp.
ComplexField2D lens_system(const ComplexField2D& field, double u, double f, double zbar, double lambda);

/// Ideal 4F relay with lenses f1 then f2: magnification -f2/f1 on both
/// coordinates, no excess phase.
ComplexField2D relay_4f(const ComplexField2D& field, double f1, double f2);

/// Box((x - d/2)/a) + Box((x + d/2)/a), with |arg| <= 1/2 counted as inside.
double double_slit_mask(double x, const SlitSpec& slit);

/// Far-field two-photon density behind a double slit:
/// |V[1/(lambda f3)]^2 F_{x1,x2}(DS(x1) DS(x2) psi)|^2 with detector coordinate
/// x = lambda f3 nu, normalized to unit mass. Requires >= 8 samples across
/// the slit width on both axes.
JPD2 interference_density(const ComplexField2D& psi_ds, const SlitSpec& slit, double f3, double lambda);

}  // namespace phasent
