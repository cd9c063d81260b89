#include "phasent/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "phasent/errors.hpp"

namespace phasent {
namespace {

double sum_sq(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

void require_square_axes(const JPD2& jpd) {
  const Grid2& g = jpd.grid();
  if (g.a1.n != g.a2.n || std::abs(g.a1.dx - g.a2.dx) > 1e-12 * g.a1.dx ||
      std::abs(g.a1.x0 - g.a2.x0) > 1e-9 * g.a1.dx * static_cast<double>(g.a1.n))
    throw DomainError("diagonal profiles need identical x1 and x2 axes");
}

struct Moments {
  double center;
  double std;
  double peak;
};

Moments moments(std::span<const double> x, std::span<const double> y) {
  double w = 0.0, m1 = 0.0, peak = y[0];
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = std::max(y[k], 0.0);
    w += v;
    m1 += v * x[k];
    peak = std::max(peak, y[k]);
  }
  if (!(w > 0.0)) throw DomainError("Gaussian fit needs some positive samples");
  const double c = m1 / w;
  double m2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) m2 += std::max(y[k], 0.0) * (x[k] - c) * (x[k] - c);
  double s = std::sqrt(m2 / w);
  const double spacing = std::abs(x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (!(s > 0.0)) s = spacing;
  return {c, s, peak};
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& fn, std::vector<double> p0, std::size_t m, const LmOptions& opts) {
  const std::size_t n = p0.size();
  if (n == 0 || m < n) throw DomainError("least squares needs at least as many residuals as parameters");
  std::vector<double> r(m), jac(m * n), r_try(m), jac_try(m * n);
  std::vector<double> p = std::move(p0);
  fn(p, r, jac);
  double cost = sum_sq(r);
  if (!std::isfinite(cost)) throw ConvergenceError("least squares: non-finite residual at the starting point");

  double lambda = 1e-3;
  LmResult out;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> J(jac.data(), m, n);
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), m);
    const Eigen::MatrixXd jtj = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * rv;

    bool accepted = false;
    double new_cost = cost;
    Eigen::VectorXd step;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      for (std::size_t k = 0; k < n; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      step = a.ldlt().solve(-g);
      std::vector<double> p_try(n);
      for (std::size_t k = 0; k < n; ++k) p_try[k] = p[k] + step[k];
      fn(p_try, r_try, jac_try);
      new_cost = sum_sq(r_try);
      if (std::isfinite(new_cost) && new_cost <= cost) {
        p.swap(p_try);
        r.swap(r_try);
        jac.swap(jac_try);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      out.converged = true;  // no descent direction left: at a minimum to working precision
      break;
    }
    double pnorm = 0.0;
    for (double v : p) pnorm += v * v;
    const bool small_step = step.norm() <= opts.tolerance * (std::sqrt(pnorm) + opts.tolerance);
    const bool small_gain = cost - new_cost <= opts.tolerance * cost;
    cost = new_cost;
    if (small_step || small_gain) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.params = std::move(p);
  out.rms_residual = std::sqrt(cost / static_cast<double>(m));
  out.iterations = it;
  return out;
}

GaussianFit1D fit_gaussian_1d(std::span<const double> x, std::span<const double> y, const Gaussian1DOptions& opts) {
  if (x.size() != y.size()) throw DomainError("Gaussian fit: x and y lengths differ");
  if (x.size() < 8) throw DomainError("Gaussian fit needs at least 8 points, got " + std::to_string(x.size()));
  const Moments mo = moments(x, y);
  // Parameters: amplitude, center, log std, [offset].
  std::vector<double> p0{mo.peak, mo.center, std::log(mo.std)};
  if (opts.fit_offset) p0.push_back(0.0);
  const std::size_t np = p0.size();
  const ResidualFn fn = [&](std::span<const double> p, std::span<double> r, std::span<double> jac) {
    const double a = p[0], c = p[1], s = std::exp(p[2]);
    const double b = opts.fit_offset ? p[3] : 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double t = (x[k] - c) / s;
      const double e = std::exp(-0.5 * t * t);
      r[k] = a * e + b - y[k];
      double* row = &jac[k * np];
      row[0] = e;
      row[1] = a * e * t / s;
      row[2] = a * e * t * t;
      if (opts.fit_offset) row[3] = 1.0;
    }
  };
  const LmResult res = levenberg_marquardt(fn, p0, x.size(), opts.lm);
  GaussianFit1D fit;
  fit.amplitude = res.params[0];
  fit.center = res.params[1];
  fit.std = std::exp(res.params[2]);
  fit.offset = opts.fit_offset ? res.params[3] : 0.0;
  fit.rms_residual = res.rms_residual;
  fit.iterations = res.iterations;
  fit.converged = res.converged;
  return fit;
}

LineProfile difference_profile(const JPD2& jpd, bool skip_main_diagonal) {
  require_square_axes(jpd);
  const std::size_t n = jpd.grid().a1.n;
  const double dx = jpd.grid().a1.dx;
  LineProfile out;
  for (std::size_t k = 0; k < 2 * n - 1; ++k) {
    const long long d = static_cast<long long>(k) - static_cast<long long>(n - 1);
    if (skip_main_diagonal && d == 0) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const long long j = static_cast<long long>(i) - d;
      if (j >= 0 && j < static_cast<long long>(n)) s += jpd(i, static_cast<std::size_t>(j));
    }
    out.coord.push_back(static_cast<double>(d) * dx);
    out.value.push_back(s);
  }
  return out;
}

LineProfile sum_profile(const JPD2& jpd, bool skip_main_diagonal) {
  require_square_axes(jpd);
  const std::size_t n = jpd.grid().a1.n;
  const Axis& a = jpd.grid().a1;
  LineProfile out;
  for (std::size_t t = 0; t < 2 * n - 1; ++t) {
    double s = 0.0;
    const std::size_t lo = t >= n ? t - (n - 1) : 0;
    const std::size_t hi = std::min(t, n - 1);
    for (std::size_t i = lo; i <= hi; ++i) {
      const std::size_t j = t - i;
      if (skip_main_diagonal && i == j) continue;
      s += jpd(i, j);
    }
    out.coord.push_back(2.0 * a.x0 + static_cast<double>(t) * a.dx);
    out.value.push_back(s);
  }
  return out;
}

FitResultDG fit_dg_2d(const JPD2& jpd, const DGFitOptions& opts) {
  require_square_axes(jpd);
  const LineProfile pd = difference_profile(jpd, opts.skip_main_diagonal);
  const LineProfile ps = sum_profile(jpd, opts.skip_main_diagonal);
  Gaussian1DOptions g1;
  g1.fit_offset = false;
  const GaussianFit1D fd = fit_gaussian_1d(pd.coord, pd.value, g1);
  const GaussianFit1D fs = fit_gaussian_1d(ps.coord, ps.value, g1);

  const Grid2& g = jpd.grid();
  std::vector<std::size_t> cells;
  cells.reserve(g.size());
  for (std::size_t i = 0; i < g.a1.n; ++i)
    for (std::size_t j = 0; j < g.a2.n; ++j)
      if (!(opts.skip_main_diagonal && i == j)) cells.push_back(g.index(i, j));

  // Parameters: amplitude, sum centre, diff centre, log sigma+, log sigma-, [background].
  std::vector<double> p0{jpd.max_value(), fs.center, fd.center, std::log(std::abs(fs.std)), std::log(std::abs(fd.std))};
  if (opts.fit_background) p0.push_back(0.0);
  const std::size_t np = p0.size();
  // Work in units of the pixel pitch so the Jacobian columns are balanced.
  const double unit = g.a1.dx;
  p0[1] /= unit;
  p0[2] /= unit;
  p0[3] -= std::log(unit);
  p0[4] -= std::log(unit);
  const double scale = std::abs(p0[0]) > 0.0 ? std::abs(p0[0]) : 1.0;
  p0[0] /= scale;

  const ResidualFn fn = [&](std::span<const double> p, std::span<double> r, std::span<double> jac) {
    const double a = p[0], s0 = p[1], d0 = p[2], sp = std::exp(p[3]), sm = std::exp(p[4]);
    const double b = opts.fit_background ? p[5] : 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::size_t c = cells[k];
      const double x1 = g.a1.at(c / g.a2.n) / unit;
      const double x2 = g.a2.at(c % g.a2.n) / unit;
      const double ts = (x1 + x2 - s0) / sp;
      const double td = (x1 - x2 - d0) / sm;
      const double e = std::exp(-0.5 * (ts * ts + td * td));
      r[k] = a * e + b - jpd.values()[c] / scale;
      double* row = &jac[k * np];
      row[0] = e;
      row[1] = a * e * ts / sp;
      row[2] = a * e * td / sm;
      row[3] = a * e * ts * ts;
      row[4] = a * e * td * td;
      if (opts.fit_background) row[5] = 1.0;
    }
  };
  const LmResult res = levenberg_marquardt(fn, p0, cells.size(), opts.lm);
  FitResultDG fit;
  fit.amplitude = res.params[0] * scale;
  fit.center_sum = res.params[1] * unit;
  fit.center_diff = res.params[2] * unit;
  fit.sigma_plus_fit = std::exp(res.params[3]) * unit;
  fit.sigma_minus_fit = std::exp(res.params[4]) * unit;
  fit.background = opts.fit_background ? res.params[5] * scale : 0.0;
  fit.rms_residual = res.rms_residual * scale;
  fit.iterations = res.iterations;
  fit.converged = res.converged;
  return fit;
}

}  // namespace phasent
