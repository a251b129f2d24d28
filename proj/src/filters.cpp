#include "cpair/filters.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "cpair/errors.hpp"

namespace cpair {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

double theta(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

double poly6(double w) {
  const double u = 1.0 - w * w;
  return u * u * u;
}

}  // namespace

double poly_filter(double omega) {
  if (!(std::abs(omega) < 1.0)) return 0.0;
  return poly6(omega);
}

double poly_filter_inverse_fourier(double t) {
  t = std::abs(t);
  const int panels = std::max(1, static_cast<int>(std::ceil(t / (2.0 * std::numbers::pi))));
  const double h = 1.0 / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    sum += Gauss::integrate([t](double w) { return poly6(w) * std::cos(w * t); }, a, a + h);
  }
  return sum / std::numbers::pi;
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = theta(s);
  const double b = theta(1.0 - s);
  return a / (a + b);
}

double smooth_filter(const FilterSpec& spec, double omega) {
  if (!(spec.rolloff_width > 0.0))
    throw InvalidFilter("roll-off width must be positive, got " +
                        std::to_string(spec.rolloff_width));
  if (!(spec.flat_radius >= 0.0))
    throw InvalidFilter("flat radius must be non-negative, got " +
                        std::to_string(spec.flat_radius));
  const double d = std::abs(omega - spec.center) - spec.flat_radius;
  if (d <= 0.0) return 1.0;
  const double s = d / spec.rolloff_width;
  if (s >= 1.0) return 0.0;
  return 1.0 - smooth_step(s);
}

WindowGrid::WindowGrid(int n_win, double half_range) : n_win_(n_win), half_range_(half_range) {
  if (n_win < 2) throw InvalidFilter("window grid needs n_win >= 2, got " + std::to_string(n_win));
  if (!(half_range > 0.0)) throw InvalidFilter("window half range must be positive");
  kappa_ = 2.0 * half_range / (n_win - 1);
}

FilterSpec WindowGrid::merged(int i, int j) const {
  if (i > j || i < 0 || j >= n_win_) throw InvalidFilter("merged window range out of bounds");
  return {0.5 * (omega(i) + omega(j)), 0.5 * (omega(j) - omega(i)), kappa_};
}

double partition_check(int n_win, int grid_points) {
  WindowGrid grid(n_win);
  double worst = 0.0;
  for (int k = 0; k < grid_points; ++k) {
    const double w = grid_points == 1 ? 0.0 : -1.0 + 2.0 * k / (grid_points - 1);
    // Only the two windows bracketing w can be nonzero.
    const int lo = std::clamp(static_cast<int>(std::floor((w + 1.0) / grid.kappa())), 0, n_win - 1);
    double sum = 0.0;
    for (int i = std::max(0, lo - 1); i <= std::min(n_win - 1, lo + 2); ++i) sum += grid.value(i, w);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

C0Estimate c0_at_resolution(double cutoff, double step) {
  if (!(cutoff > 0.0) || !(step > 0.0) || step > 1.0)
    throw InvalidParameter("c0 quadrature needs cutoff > 0 and 0 < step <= 1");

  // Bracket the sign changes of f on a uniform grid, then polish each zero so
  // that |f| is smooth on every integration panel.
  const auto f = [](double t) { return poly_filter_inverse_fourier(t); };
  std::vector<double> nodes{0.0};
  const long n = static_cast<long>(std::ceil(cutoff / step));
  double t_prev = 0.0;
  double f_prev = f(0.0);
  for (long k = 1; k <= n; ++k) {
    const double t = std::min(cutoff, k * step);
    const double ft = f(t);
    if ((f_prev < 0.0) != (ft < 0.0) && f_prev != 0.0 && ft != 0.0) {
      boost::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(52);
      auto r = boost::math::tools::toms748_solve(f, t_prev, t, f_prev, ft, tol, iters);
      nodes.push_back(0.5 * (r.first + r.second));
    }
    t_prev = t;
    f_prev = ft;
  }
  nodes.push_back(cutoff);

  double body = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k];
    const double b = nodes[k + 1];
    if (b <= a) continue;
    body += Gauss::integrate([&](double t) { return t * std::abs(f(t)); }, a, b);
  }

  C0Estimate e;
  e.cutoff = cutoff;
  e.step = step;
  e.tail = 96.0 / (std::numbers::pi * std::numbers::pi * cutoff * cutoff);
  e.value = 2.0 * body + e.tail;
  return e;
}

const C0Result& compute_c0() {
  static std::once_flag once;
  static C0Result result;
  static std::exception_ptr failure;
  std::call_once(once, [] {
    try {
      double cutoff = 100.0;
      double step = 0.25;
      C0Estimate prev = c0_at_resolution(cutoff, step);
      for (int k = 1; k <= 6; ++k) {
        cutoff *= 2.0;
        step *= 0.5;
        C0Estimate cur = c0_at_resolution(cutoff, step);
        const double rel = std::abs(cur.value - prev.value) / std::abs(cur.value);
        if (rel < 1e-6) {
          result = {cur.value, prev.value, rel, k};
          return;
        }
        prev = cur;
      }
      throw QuadratureError("c0 quadrature did not converge to 1e-6 relative");
    } catch (...) {
      failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace cpair
