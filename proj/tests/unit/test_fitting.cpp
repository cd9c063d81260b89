#include <cmath>

#include "doctest.h"
#include "phasent/biphoton.hpp"
#include "phasent/camera.hpp"
#include "phasent/errors.hpp"
#include "phasent/fitting.hpp"

using namespace phasent;

TEST_CASE("Levenberg-Marquardt on an exponential decay") {
  std::vector<double> x(40), y(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 0.1 * static_cast<double>(i);
    y[i] = 3.0 * std::exp(-1.7 * x[i]);
  }
  const ResidualFn fn = [&](std::span<const double> p, std::span<double> r, std::span<double> jac) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = std::exp(-p[1] * x[i]);
      r[i] = p[0] * e - y[i];
      jac[2 * i] = e;
      jac[2 * i + 1] = -p[0] * x[i] * e;
    }
  };
  const LmResult res = levenberg_marquardt(fn, {1.0, 0.5}, x.size());
  CHECK(res.converged);
  CHECK(res.params[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(res.params[1] == doctest::Approx(1.7).epsilon(1e-9));
  CHECK(res.rms_residual < 1e-10);
}

TEST_CASE("exact sampled Gaussian") {
  std::vector<double> x(81), y(81);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = -4.0 + 0.1 * static_cast<double>(i);
    const double t = (x[i] - 0.37) / 0.83;
    y[i] = 2.5 * std::exp(-0.5 * t * t);
  }
  const GaussianFit1D fit = fit_gaussian_1d(x, y);
  CHECK(fit.converged);
  CHECK(fit.std == doctest::Approx(0.83).epsilon(1e-6));
  CHECK(fit.center == doctest::Approx(0.37).epsilon(1e-6));
  CHECK(fit.amplitude == doctest::Approx(2.5).epsilon(1e-6));

  for (double& v : y) v += 0.4;
  const GaussianFit1D off = fit_gaussian_1d(x, y, Gaussian1DOptions{.fit_offset = true});
  CHECK(off.std == doctest::Approx(0.83).epsilon(1e-6));
  CHECK(off.offset == doctest::Approx(0.4).epsilon(1e-6));

  CHECK_THROWS_AS(fit_gaussian_1d(std::span(x).first(5), std::span(y).first(5)), DomainError);
}

TEST_CASE("DG fit on an analytic density") {
  const DGSource src{140.2e-6, 12.6e-6, 810e-9};
  const Grid2 grid = Grid2::square(401, 4.0 * src.sigma_plus());
  const JPD2 rho = jpd_analytic(src, grid, 0.0);
  const FitResultDG fit = fit_dg_2d(rho);
  CHECK(fit.converged);
  CHECK(fit.sigma_plus_fit == doctest::Approx(src.sigma_plus()).epsilon(1e-4));
  CHECK(fit.sigma_minus_fit == doctest::Approx(src.sigma_minus()).epsilon(1e-4));
  CHECK(std::abs(fit.center_diff) < 1e-9);
}

TEST_CASE("line profiles") {
  const Grid2 grid = Grid2::square(5, 2.0);
  std::vector<double> v(25, 0.0);
  v[grid.index(1, 2)] = 1.0;
  v[grid.index(3, 4)] = 2.0;
  v[grid.index(2, 2)] = 7.0;
  const JPD2 rho{grid, v};
  const LineProfile d = difference_profile(rho);
  REQUIRE(d.coord.size() == 9);
  CHECK(d.coord[4] == doctest::Approx(0.0));
  CHECK(d.value[4] == doctest::Approx(7.0));
  CHECK(d.coord[3] == doctest::Approx(-1.0));
  CHECK(d.value[3] == doctest::Approx(3.0));
  CHECK(difference_profile(rho, true).value[4] == 0.0);
  const LineProfile s = sum_profile(rho);
  REQUIRE(s.coord.size() == 9);
  CHECK(s.coord[0] == doctest::Approx(-4.0));
  CHECK(s.value[3] == doctest::Approx(1.0));
  CHECK(s.value[4] == doctest::Approx(7.0));
  CHECK(s.value[7] == doctest::Approx(2.0));
}
