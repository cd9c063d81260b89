#pragma once

// Test-side reference formulas. Written independently of the library so that
// a shared mistake cannot make both sides agree.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double wavenumber(double lambda) { return 2.0 * pi / lambda; }

// Width growth of a sum or difference coordinate: w(z) = w0 sqrt(1 + (z / zr)^2)
// with zr = k w0^2 (the coordinate diffracts twice as fast as one photon).
inline double dg_width(double w0, double z, double lambda) {
  const double zr = wavenumber(lambda) * w0 * w0;
  return w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
}

// One photon with intensity std w0 at its waist: zr = 2 k w0^2.
inline double photon_width(double w0, double z, double lambda) {
  const double zr = 2.0 * wavenumber(lambda) * w0 * w0;
  return w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
}

inline double phase_distance(double sp, double sm, double lambda) { return wavenumber(lambda) * sp * sm; }

inline double schmidt(double sp, double sm) {
  const double r = sp / sm;
  return 0.25 * (r + 1.0 / r) * (r + 1.0 / r);
}

inline double fedorov(double sp, double sm, double z, double lambda) {
  const double a = dg_width(sp, z, lambda), b = dg_width(sm, z, lambda);
  return 0.5 * (a / b + b / a);
}

// Propagated DG amplitude written in (x1, x2) directly, with the complex
// beam parameter q = sigma^2 + i z / k.
inline std::complex<double> dg_amplitude(double x1, double x2, double sp, double sm, double z, double lambda) {
  const std::complex<double> i{0.0, 1.0};
  const double k = wavenumber(lambda);
  const std::complex<double> qm = sm * sm + i * z / k;
  const std::complex<double> qp = sp * sp + i * z / k;
  const double d = x1 - x2, s = x1 + x2;
  return std::exp(-d * d / (4.0 * qm) - s * s / (4.0 * qp));
}

// Thin lens imaging mapped back to free propagation.
struct Fold {
  double z, s, c;
};
inline Fold fold(double u, double f, double zbar) {
  const double v = zbar * f / (zbar - f);
  return {u - v, 1.0 / (1.0 - zbar / f), 1.0 / (zbar - f)};
}

// Inverse of fold().z by bisection on (f, 3f-ish].
inline double zbar_for(double u, double f, double z) {
  double lo = f * (1.0 + 1e-12), hi = 1e3 * f;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fold(u, f, mid).z < z) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double butterworth(double f, double lo, double hi, int n) {
  const double hp = lo > 0.0 ? std::pow(f / lo, 2 * n) / (1.0 + std::pow(f / lo, 2 * n)) : 1.0;
  const double lp = 1.0 / (1.0 + std::pow(f / hi, 2 * n));
  return hp * lp;
}

inline double mean(const std::vector<double>& x, const std::vector<double>& w) {
  double s = 0.0, t = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += w[i] * x[i];
    t += w[i];
  }
  return s / t;
}

inline double stddev(const std::vector<double>& x, const std::vector<double>& w) {
  const double m = mean(x, w);
  double s = 0.0, t = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += w[i] * (x[i] - m) * (x[i] - m);
    t += w[i];
  }
  return std::sqrt(s / t);
}

}  // namespace oracle
