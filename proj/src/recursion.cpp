#include "cpair/recursion.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "cpair/errors.hpp"
#include "cpair/parallel.hpp"

namespace cpair {

void RecursionParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 0.05)) throw InvalidParameter("lambda must lie in [0, 0.05]");
  if (!(grid_spacing > 0.0 && grid_spacing <= 1e-2)) throw InvalidParameter("grid spacing must lie in (0, 1e-2]");
  if (!(g_low_strong <= g_low && g_low < g_high)) throw InvalidParameter("thresholds must satisfy strong <= low < high");
  if (!(y_cut > 0.0 && y_cut < 1.0)) throw InvalidParameter("y_cut must lie in (0, 1)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// g_step without throwing; +inf marks a nonpositive denominator.
double g_raw(double G, double x2, double y2, double lambda) {
  const double c = 1.0 - lambda - y2;
  if (!(c > 0.0)) return kInf;
  const double den = 1.0 - x2 * G / c;
  if (!(den > 0.0)) return kInf;
  return 1.0 / c + x2 * G * y2 / (c * c) / den;
}

struct RowResult {
  double max_G = -kInf;
  GridPoint argmax;
  double max_low = -kInf;
  GridPoint argmax_low;
  double lipschitz = 0.0;
  std::size_t points = 0;
  std::size_t skipped = 0;
  std::size_t failures = 0;
};

long grid_count(double h) { return static_cast<long>(std::floor(1.0 / h + 1e-9)); }

// Values along one row of first/second simulation; NaN where infeasible.
std::vector<double> two_step_row(double b, double G_start, long nx, double h, double lambda) {
  std::vector<double> out(static_cast<std::size_t>(nx + 1), std::nan(""));
  const double a2 = 0.5 - b * b;
  const double one_b2 = 1.0 - b * b;
  if (a2 < 0.0 || !(one_b2 > 0.0)) return out;
  const double G_mid = g_raw(G_start, a2, b * b, lambda);
  for (long k = 0; k <= nx; ++k) {
    const double x = k * h;
    const double y2 = 0.5 - x * x / one_b2;
    if (y2 < 0.0) continue;
    out[static_cast<std::size_t>(k)] = std::isinf(G_mid) ? kInf : g_raw(G_mid, x * x, y2, lambda);
  }
  return out;
}

void update(double G, const GridPoint& pt, double& best, GridPoint& arg) {
  if (G > best) {
    best = G;
    arg = pt;
  }
}

double lipschitz_of(const std::vector<double>& row, const std::vector<double>* next, double h) {
  double L = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (std::isnan(row[k]) || std::isinf(row[k])) continue;
    if (k + 1 < row.size() && std::isfinite(row[k + 1])) L = std::max(L, std::abs(row[k + 1] - row[k]) / h);
    if (next && std::isfinite((*next)[k])) L = std::max(L, std::abs((*next)[k] - row[k]) / h);
  }
  return L;
}

Certificate reduce_rows(const std::vector<RowResult>& rows, Certificate c) {
  RowResult total;
  for (const RowResult& r : rows) {
    update(r.max_G, r.argmax, total.max_G, total.argmax);
    update(r.max_low, r.argmax_low, total.max_low, total.argmax_low);
    total.lipschitz = std::max(total.lipschitz, r.lipschitz);
    total.points += r.points;
    total.skipped += r.skipped;
    total.failures += r.failures;
  }
  c.max_G = total.max_G;
  c.argmax = total.argmax;
  c.max_G_low_region = total.max_low;
  c.argmax_low_region = total.argmax_low;
  c.lipschitz = total.lipschitz;
  c.points = total.points;
  c.skipped = total.skipped;
  c.denominator_failures = total.failures;
  return c;
}

Certificate two_step_simulation(const RecursionParams& p, const std::string& name, double G_start, double b_min_exclusive,
                                double low_threshold) {
  p.validate();
  const double h = p.grid_spacing;
  const long n = grid_count(h);
  const std::vector<RowResult> rows = parallel_map(
      static_cast<std::size_t>(n + 1),
      [&](std::size_t i) {
        RowResult r;
        const double b = static_cast<double>(i) * h;
        if (!(b > b_min_exclusive)) {
          r.skipped = static_cast<std::size_t>(n + 1);
          return r;
        }
        const std::vector<double> row = two_step_row(b, G_start, n, h, p.lambda);
        const std::vector<double> next = two_step_row(b + h, G_start, n, h, p.lambda);
        const double a2 = 0.5 - b * b;
        const double G_mid = a2 >= 0.0 ? g_raw(G_start, a2, b * b, p.lambda) : kInf;
        for (long k = 0; k <= n; ++k) {
          const double G = row[static_cast<std::size_t>(k)];
          if (std::isnan(G)) {
            ++r.skipped;
            continue;
          }
          ++r.points;
          if (std::isinf(G)) ++r.failures;
          const double x = k * h;
          const GridPoint pt{b, x, G_mid, G};
          update(G, pt, r.max_G, r.argmax);
          const double y = std::sqrt(std::max(0.0, 0.5 - x * x / (1.0 - b * b)));
          if (y <= p.y_cut) update(G, pt, r.max_low, r.argmax_low);
        }
        r.lipschitz = lipschitz_of(row, &next, h);
        return r;
      },
      p.threads);
  Certificate c;
  c.simulation = name;
  c.low_threshold = low_threshold;
  c.high_threshold = p.g_high;
  c = reduce_rows(rows, c);
  c.margin = std::min(low_threshold - c.max_G_low_region, p.g_high - c.max_G);
  c.pass = c.points > 0 && c.denominator_failures == 0 && c.max_G_low_region <= low_threshold && c.max_G <= p.g_high;
  return c;
}

}  // namespace

double g_step(double G_prev, double x, double y, double lambda) {
  const double c = 1.0 - lambda - y * y;
  if (!(c > 0.0)) throw DenominatorNonpositive("1 - lambda - y^2 must be positive");
  const double den = 1.0 - x * x * G_prev / c;
  if (!(den > 0.0)) throw DenominatorNonpositive("1 - x^2 G / (1 - lambda - y^2) must be positive");
  return 1.0 / c + x * x * G_prev * y * y / (c * c) / den;
}

double g_step_schur(double G_prev, double x, double y, double lambda) {
  const double d = 1.0 - lambda;
  const double inner = d - x * x * G_prev;
  if (!(inner > 0.0)) throw DenominatorNonpositive("d - x^2 G must be positive");
  const double outer = d - y * y / inner;
  if (!(outer > 0.0)) throw DenominatorNonpositive("d - y^2 / (d - x^2 G) must be positive");
  return 1.0 / outer;
}

Certificate run_first_simulation(const RecursionParams& p) {
  return two_step_simulation(p, "first", p.g_low, -1.0, p.g_low_strong);
}

Certificate run_second_simulation(const RecursionParams& p) {
  return two_step_simulation(p, "second", p.g_high, p.y_cut, p.g_low);
}

Certificate run_third_simulation(const RecursionParams& p) {
  p.validate();
  const double h = p.grid_spacing;
  const long n = grid_count(h);
  auto row_values = [&](double y) {
    std::vector<double> out(static_cast<std::size_t>(n + 1), std::nan(""));
    for (long k = 0; k <= n; ++k) {
      const double x = k * h;
      if (x * x + y * y <= 0.5) out[static_cast<std::size_t>(k)] = g_raw(p.g_low, x * x, y * y, p.lambda);
    }
    return out;
  };
  const std::vector<RowResult> rows = parallel_map(
      static_cast<std::size_t>(n + 1),
      [&](std::size_t i) {
        RowResult r;
        const double y = static_cast<double>(i) * h;
        const std::vector<double> row = row_values(y), next = row_values(y + h);
        for (long k = 0; k <= n; ++k) {
          const double G = row[static_cast<std::size_t>(k)];
          if (std::isnan(G)) {
            ++r.skipped;
            continue;
          }
          ++r.points;
          if (std::isinf(G)) ++r.failures;
          update(G, GridPoint{y, k * h, p.g_low, G}, r.max_G, r.argmax);
        }
        r.max_low = r.max_G;
        r.argmax_low = r.argmax;
        r.lipschitz = lipschitz_of(row, &next, h);
        return r;
      },
      p.threads);
  Certificate c;
  c.simulation = "third";
  c.low_threshold = p.g_high;
  c.high_threshold = p.g_high;
  c = reduce_rows(rows, c);
  c.margin = p.g_high - c.max_G;
  c.pass = c.points > 0 && c.denominator_failures == 0 && c.max_G < p.g_high;
  return c;
}

InductionReport induction_check(const Certificate& first, const Certificate& second, const Certificate& third,
                                const RecursionParams& p, int horizon) {
  p.validate();
  if (horizon < 4) throw InvalidParameter("horizon must be at least 4");
  InductionReport rep;
  rep.G0_shifted = 1.0 / (1.0 - p.lambda);
  rep.large_coupling_step = second.pass;
  rep.small_coupling_step = third.pass && first.pass;
  // G_0 has no left coupling, so * requires G_0 <= 1.9 outright.
  rep.base_unit = rep.G0_unit <= p.g_low;
  rep.base_shifted = rep.G0_shifted <= p.g_low;

  // ok[m]: from * at m (and G_l < 2.1 for even l <= m) every branch keeps
  // all even indices up to the horizon below 2.1.
  std::vector<int> memo(static_cast<std::size_t>(horizon + 5), -1);
  std::function<bool(int)> ok = [&](int m) -> bool {
    if (m >= horizon) return true;
    int& slot = memo[static_cast<std::size_t>(m)];
    if (slot >= 0) return slot == 1;
    bool good = true;
    // Coupling |M_{m,m-1}| > 0.54: needs G_{m-2} < 2.1, then * at m+2.
    if (m > 0) good = good && rep.large_coupling_step && ok(m + 2);
    // Coupling <= 0.54: G_m <= 1.9, third gives G_{m+2} < 2.1, first gives * at m+4.
    good = good && rep.small_coupling_step && ok(m + 4);
    slot = good ? 1 : 0;
    return good;
  };
  const bool steps = ok(0);
  rep.horizon = horizon;
  rep.conclusion_unit = rep.base_unit && steps;
  rep.conclusion_shifted = rep.base_shifted && steps;
  return rep;
}

}  // namespace cpair
