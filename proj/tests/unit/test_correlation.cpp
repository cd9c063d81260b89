#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "phasent/correlation.hpp"
#include "phasent/diagnostics.hpp"
#include "phasent/errors.hpp"

using namespace phasent;

namespace {
constexpr double um = 1e-6;
constexpr double mm = 1e-3;
const DGSource src{140.2 * um, 12.6 * um, 810e-9};
}  // namespace

TEST_CASE("marginals") {
  const Grid2 g = Grid2::square(64, 3.0);
  std::vector<double> m(64), v(64 * 64);
  for (std::size_t i = 0; i < 64; ++i) m[i] = std::exp(-0.5 * g.a1.at(i) * g.a1.at(i));
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) v[g.index(i, j)] = m[i] * m[j];
  const std::vector<double> out = marginal_g1(JPD2{g, v});
  double norm = 0.0;
  for (double x : m) norm += x * g.a1.dx;
  for (std::size_t i = 0; i < 64; ++i) CHECK(out[i] == doctest::Approx(m[i] / norm).epsilon(1e-12));

  const Grid2 wide = Grid2::square(301, 4.0 * src.sigma_plus());
  const std::vector<double> dg = marginal_g1(jpd_analytic(src, wide, 0.0));
  std::vector<double> x(301);
  for (std::size_t i = 0; i < 301; ++i) x[i] = wide.a1.at(i);
  const double expected = 0.5 * std::hypot(src.sigma_plus(), src.sigma_minus());
  CHECK(oracle::stddev(x, dg) == doctest::Approx(expected).epsilon(1e-3));

  v[g.index(3, 40)] += 5.0;
  WarningCapture w;
  marginal_g1(JPD2{g, v});
  CHECK(w.contains("symmetric"));
}

TEST_CASE("excess correlation") {
  const Grid2 g{Axis{2, 0.0, 1.0}, Axis{2, 0.0, 1.0}};
  const JPD2 dg = delta_g2(JPD2{g, {0.5, 0.0, 0.0, 0.5}});
  CHECK(dg(0, 0) == doctest::Approx(0.25));
  CHECK(dg(0, 1) == doctest::Approx(-0.25));
  CHECK(dg(1, 0) == doctest::Approx(-0.25));
  CHECK(dg(1, 1) == doctest::Approx(0.25));

  const Grid2 grid = Grid2::square(201, 4.0 * src.sigma_plus());
  const JPD2 rho = jpd_analytic(src, grid, 0.0);
  const JPD2 ex = delta_g2(rho);
  CHECK(std::abs(ex.mass()) < 1e-10);
  double asym = 0.0;
  for (std::size_t i = 0; i < 201; ++i)
    for (std::size_t j = 0; j < 201; ++j) asym = std::max(asym, std::abs(ex(i, j) - ex(j, i)));
  CHECK(asym / rho.max_value() < 1e-12);
  CHECK(ridge_correlation(ex, rho) > 0.9);

  const double zp = z_phase(src);
  const JPD2 flat = jpd_analytic(src, Grid2::square(201, required_half_extent(src, zp) * 1.5), zp);
  double worst = 0.0;
  for (double v : delta_g2(flat).values()) worst = std::max(worst, std::abs(v));
  CHECK(worst / flat.max_value() < 1e-10);
}

TEST_CASE("fringe visibility") {
  const Axis a = Axis::spanning(512, 2 * mm);
  const double period = 253 * um;
  std::vector<double> fringes(512), flat(512);
  for (std::size_t i = 0; i < 512; ++i) {
    const double x = a.at(i);
    const double env = std::exp(-0.5 * x * x / (0.6 * mm * 0.6 * mm));
    fringes[i] = env * (1.0 + std::cos(2.0 * std::numbers::pi * x / period));
    flat[i] = env;
  }
  CHECK(fringe_visibility(fringes, a, period) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(fringe_visibility(flat, a, period) < 1e-3);
  CHECK_THROWS_AS(fringe_visibility(flat, a, 2.0 * a.dx), DomainError);
  CHECK_THROWS_AS(fringe_visibility(std::vector<double>(10, 1.0), a, period), DomainError);
}

TEST_CASE("width-based Fedorov ratio") {
  CHECK(fedorov_from_widths(2.0, 2.0) == doctest::Approx(1.0));
  CHECK(fedorov_from_widths(140.2, 12.6) == doctest::Approx(fedorov_analytic(src, 0.0)));
  CHECK_THROWS_AS(fedorov_from_widths(0.0, 1.0), DomainError);
}

TEST_CASE("analytic sweep") {
  const double u = 60 * mm, f = 40 * mm;
  const std::vector<double> zbars = {120 * mm, 50 * mm, 130 * mm, 35 * mm, 87.4736 * mm};
  const std::vector<SweepResult> res = fedorov_sweep(src, u, f, zbars, SweepMode::analytic);
  REQUIRE(res.size() == 5);
  for (std::size_t k = 1; k < res.size(); ++k) CHECK(res[k].zbar >= res[k - 1].zbar);
  CHECK_FALSE(res.front().point.has_value());
  CHECK_FALSE(res.front().error.empty());
  CHECK_FALSE(res.back().point.has_value());
  REQUIRE(res[3].point.has_value());
  CHECK(res[3].point->fedorov == doctest::Approx(fedorov_analytic(src, 0.0)));
  CHECK(res[2].point->fedorov == doctest::Approx(1.0).epsilon(1e-4));
  for (std::size_t k = 1; k < 4; ++k) CHECK(res[k].point->fedorov >= 1.0);

  const double zbar_p = zbar_phase(src, u, f);
  CHECK(zbar_p == doctest::Approx(oracle::zbar_for(u, f, -oracle::phase_distance(140.2 * um, 12.6 * um, 810e-9))));
  const std::vector<double> grid = zbar_grid(u, f, 8, &src);
  CHECK(grid.size() == 8);
  CHECK(grid.back() == doctest::Approx(120 * mm));
  CHECK(std::count(grid.begin(), grid.end(), zbar_p) == 1);
  CHECK_THROWS_AS(zbar_grid(u, f, 0), DomainError);
}

TEST_CASE("simulated sweep point at the imaging plane") {
  SweepSimulation sim;
  sim.camera.eta = 0.6;
  sim.frames = 20000;
  const double u = 60 * mm, f = 40 * mm;
  const std::vector<double> zbars = {3 * f};
  WarningCapture quiet;
  const std::vector<SweepResult> res = fedorov_sweep(src, u, f, zbars, SweepMode::simulate, &sim);
  REQUIRE(res[0].point.has_value());
  CHECK(res[0].point->source == SweepMode::simulate);
  CHECK(res[0].point->fedorov == doctest::Approx(fedorov_analytic(src, 0.0)).epsilon(0.15));
  CHECK_THROWS_AS(fedorov_sweep(src, u, f, zbars, SweepMode::simulate), DomainError);
}
