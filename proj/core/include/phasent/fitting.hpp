#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "phasent/grid.hpp"

namespace phasent {

struct LmOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;  ///< relative cost decrease / step size stop
};

struct LmResult {
  std::vector<double> params;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Fills residuals r (size m) and the row-major m x n Jacobian dr/dp.
using ResidualFn = std::function<void(std::span<const double> p, std::span<double> r, std::span<double> jac)>;

/// Levenberg-Marquardt with Marquardt diagonal scaling.
LmResult levenberg_marquardt(const ResidualFn& fn, std::vector<double> p0, std::size_t m,
                             const LmOptions& opts = {});

struct GaussianFit1D {
  double std = 0.0;
  double amplitude = 0.0;
  double center = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct Gaussian1DOptions {
  bool fit_offset = false;
  LmOptions lm{};
};

/// Least-squares fit of a exp(-(x-c)^2 / (2 s^2)) (+ b) to samples (x, y),
/// initialized from second moments. Needs >= 8 points. Non-convergence is
/// reported in the result, not thrown.
GaussianFit1D fit_gaussian_1d(std::span<const double> x, std::span<const double> y,
                              const Gaussian1DOptions& opts = {});

/// Sums of a density along lines of constant x1 - x2 (difference profile) or
/// x1 + x2 (sum profile). Needs identical axes. Coordinates are physical.
struct LineProfile {
  std::vector<double> coord;
  std::vector<double> value;
};
LineProfile difference_profile(const JPD2& jpd, bool skip_main_diagonal = false);
LineProfile sum_profile(const JPD2& jpd, bool skip_main_diagonal = false);

struct FitResultDG {
  double sigma_plus_fit = 0.0;   ///< std of x1 + x2
  double sigma_minus_fit = 0.0;  ///< std of x1 - x2
  double amplitude = 0.0;
  double center_sum = 0.0;
  double center_diff = 0.0;
  double background = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct DGFitOptions {
  bool skip_main_diagonal = false;  ///< ignore cells with x1 == x2 (zeroed estimator diagonal)
  bool fit_background = false;
  LmOptions lm{};
};

/// A exp(-(d - d0)^2 / (2 sm^2) - (s - s0)^2 / (2 sp^2)) (+ b) with d = x1 - x2,
/// s = x1 + x2. 1D fits on the two line profiles seed a joint 2D refinement.
FitResultDG fit_dg_2d(const JPD2& jpd, const DGFitOptions& opts = {});

}  // namespace phasent
