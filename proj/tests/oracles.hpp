// Test-side reference implementations, written independently of the library
// internals: dense long double potentials, quadrature, distribution
// functions, and a full-sweep step selector.  Slow and simple on purpose.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "nnsparse/potential.hpp"
#include "nnsparse/solver.hpp"
#include "nnsparse/types.hpp"

namespace oracle {

// Dense potential in long double: sum_j b_j * (1+delta)^(y_j/b_j), zero
// rows skipped, summed left to right.
inline long double dense_log_phi(std::span<const double> b, double delta,
                                 std::span<const double> y) {
  long double s = 0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j] <= 0) continue;
    s += static_cast<long double>(b[j]) *
         std::pow(1.0L + static_cast<long double>(delta),
                  static_cast<long double>(y[j]) /
                      static_cast<long double>(b[j]));
  }
  return std::log(s);
}

inline long double dense_residual(std::span<const double> b,
                                  std::span<const double> y, double psi) {
  long double r = 0;
  for (std::size_t j = 0; j < b.size(); ++j)
    r += std::abs(static_cast<long double>(y[j]) / psi -
                  static_cast<long double>(b[j]));
  return r;
}

// Full-sweep mirror of the selection contract: per column the largest grid
// step whose log ratio stays under thresh * theta, largest step overall,
// ties to the smallest storage index, minimum-rate fallback.  No pruning,
// no galloping; every (column, step) pair is inspected from the top down.
inline nnsparse::Increment reference_select(
    const nnsparse::SolverState& state, const nnsparse::ColumnOracle& oracle,
    const nnsparse::SolverParams& params, std::span<const double> grid) {
  const auto mu = state.mu();
  const auto b = state.b();
  const double l = state.log1p_delta();
  const std::size_t n = oracle.column_count();

  std::vector<double> rate0(n);
  double rate_min = std::numeric_limits<double>::infinity();
  std::size_t i_min = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0;
    for (const auto& [r, a] : oracle.column(i).entries) {
      if (b[r] == 0) continue;
      acc += mu[r] * (a / b[r]);
    }
    rate0[i] = l * acc;
    if (rate0[i] < rate_min) {
      rate_min = rate0[i];
      i_min = i;
    }
  }
  const double thresh = rate_min + 0.75 * params.delta * l;

  std::size_t best_i = n;
  long best_t = -1;
  double best_g = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (long t = static_cast<long>(grid.size()) - 1; t >= 0; --t) {
      const double g = nnsparse::increment_log_ratio(
          state, oracle.column(i), grid[static_cast<std::size_t>(t)]);
      if (g <= thresh * grid[static_cast<std::size_t>(t)]) {
        if (t > best_t) {
          best_t = t;
          best_i = i;
          best_g = g;
        }
        break;
      }
    }
  }
  if (best_i == n) {
    best_i = i_min;
    best_t = 0;
    best_g =
        nnsparse::increment_log_ratio(state, oracle.column(best_i), grid[0]);
  }
  return nnsparse::Increment{best_i, oracle.column_id(best_i),
                             grid[static_cast<std::size_t>(best_t)], best_g};
}

// Adaptive Simpson quadrature with error-halving recursion.
inline double simpson_piece(double a, double b, double fa, double fm,
                            double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson_rec(F&& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_piece(a, m, fa, flm, fm);
  const double right = simpson_piece(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10,
                        int depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = simpson_piece(a, b, fa, fm, fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

inline double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) /
         (sigma * std::sqrt(2.0 * 3.14159265358979323846));
}

inline double normal_cdf(double x, double mu = 0, double sigma = 1) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

// Standard normal quantile by bisection on the cdf.
inline double inv_normal_cdf(double p) {
  double lo = -40, hi = 40;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Regularized incomplete gamma functions (series + continued fraction),
// for chi-square tail probabilities: chi2_sf(x, df) = Q(df/2, x/2).
inline double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double chi2_sf(double x, double df) {
  const double a = df / 2, xx = x / 2;
  if (xx <= 0) return 1.0;
  if (xx < a + 1) return 1.0 - gamma_p_series(a, xx);
  return gamma_q_cf(a, xx);
}

}  // namespace oracle
