#pragma once

// Reference samplers (rejection, numerical inverse CDF), divergence
// estimators between a model density and its sampling density, and the
// closed-form approximation-error bounds for triangular-kernel sampling.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <iomanip>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "daas/errors.hpp"
#include "daas/fbm.hpp"
#include "daas/random.hpp"
#include "daas/sample_batch.hpp"

namespace daas {

template <class F>
concept Density = std::regular_invocable<F, double> && std::convertible_to<std::invoke_result_t<F, double>, double>;

enum class EstimateMethod { quadrature, monte_carlo, empirical };

inline const char* to_string(EstimateMethod method) {
  switch (method) {
    case EstimateMethod::quadrature:
      return "quadrature";
    case EstimateMethod::monte_carlo:
      return "monte-carlo";
    default:
      return "empirical";
  }
}

struct DivergenceReport {
  double estimate = 0.0;
  double std_error = 0.0;
  EstimateMethod method = EstimateMethod::quadrature;
};

/// CSV row `method,estimate,std_error`.
inline void write_report(std::ostream& out, const DivergenceReport& report) {
  const auto precision = out.precision();
  out << std::setprecision(17) << to_string(report.method) << ',' << report.estimate << ',' << report.std_error
      << '\n';
  out.precision(precision);
}

// ---------------------------------------------------------------------------
// Reference samplers

/// Envelope constant M for the uniform proposal e(x) = 1/2. Uses
/// p(x) <= 1/2 + sum |c_n|/c_0, so M e(x) >= p(x) everywhere.
inline double envelope_constant(const FbmModel& model) {
  double total = 0.0;
  for (std::size_t n = 1; n < model.ratios().size(); ++n) total += std::abs(model.ratios()[n]);
  return 1.0 + 2.0 * total;
}

/// Exact samples of p. Bills one pdf evaluation per proposal.
inline SampleBatch rejection_sample(const FbmModel& model, std::int64_t count, Rng& rng, EvalCounter& counter) {
  if (count < 1) throw ParameterError("sample count S must be at least 1");
  const double envelope = envelope_constant(model);
  const double accept_scale = 2.0 / envelope;
  SampleBatch batch;
  batch.seed = rng.seed();
  batch.samples.reserve(static_cast<std::size_t>(count));
  EvalCounter spent;
  std::uint64_t proposals = 0;
  while (batch.samples.size() < static_cast<std::size_t>(count)) {
    const double x = rng.uniform(-1.0, 1.0);
    const double u = rng.uniform();
    ++proposals;
    if (u <= pdf(model, x, spent) * accept_scale) batch.samples.push_back(x);
  }
  batch.acceptance_rate = static_cast<double>(count) / static_cast<double>(proposals);
  counter += spent;
  batch.evals = spent;
  return batch;
}

/// Bisection for cdf(x) = u on [-1, 1] until the bracket is narrower than `tol`.
inline double invert_cdf(const FbmModel& model, double u, double tol) {
  if (!(tol > 0.0)) throw ParameterError("bisection tolerance must be positive");
  double lo = -1.0;
  double hi = 1.0;
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (cdf(model, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline SampleBatch inverse_transform_sample(const FbmModel& model, std::int64_t count, Rng& rng, double tol) {
  if (count < 1) throw ParameterError("sample count S must be at least 1");
  if (!(tol > 0.0)) throw ParameterError("bisection tolerance must be positive");
  SampleBatch batch;
  batch.seed = rng.seed();
  batch.samples.resize(static_cast<std::size_t>(count));
  for (auto& x : batch.samples) x = invert_cdf(model, rng.uniform(), tol);
  return batch;
}

// ---------------------------------------------------------------------------
// Approximation-error bounds for the triangular kernel

/// Sup-norm error of piecewise-linear interpolation on K knots; also bounds TV.
inline double tv_bound(int degree, int grid_size) {
  if (degree < 0) throw ParameterError("N must be non-negative");
  if (grid_size < min_grid_size(degree)) throw ParameterError("K must be at least 2N+1");
  const double n = degree;
  const double k = grid_size;
  return std::numbers::pi * std::numbers::pi * n * (n + 1.0) * (2.0 * n + 1.0) / (12.0 * k * k);
}

inline double w1_bound(int degree, int grid_size) { return 2.0 * tv_bound(degree, grid_size); }

// ---------------------------------------------------------------------------
// Quadrature estimators

struct QuadratureOptions {
  int grid_points = 20000;
  /// Stop doubling once successive estimates differ by less than this.
  double tolerance = 1e-8;
  int max_doublings = 6;
};

namespace detail {

template <class Estimate>
DivergenceReport refine_quadrature(const QuadratureOptions& opts, Estimate&& estimate) {
  if (opts.grid_points < 1000) throw ParameterError("quadrature needs at least 1000 grid points");
  double current = estimate(opts.grid_points);
  double change = 0.0;
  int points = opts.grid_points;
  for (int i = 0; i < opts.max_doublings; ++i) {
    points *= 2;
    const double next = estimate(points);
    change = std::abs(next - current);
    current = next;
    if (change < opts.tolerance) break;
  }
  if (!std::isfinite(current)) throw NumericalError("quadrature produced a non-finite estimate");
  return {current, change, EstimateMethod::quadrature};
}

}  // namespace detail

/// D_TV(p, q) = 1/2 int |p - q| over [-1, 1) by the (periodic) trapezoid rule.
/// `std_error` carries the last refinement change.
template <Density P, Density Q>
DivergenceReport tv_quadrature(P&& p_eval, Q&& q_eval, const QuadratureOptions& opts = {}) {
  return detail::refine_quadrature(opts, [&](int points) {
    const double h = 2.0 / points;
    double acc = 0.0;
    for (int i = 0; i < points; ++i) {
      const double x = -1.0 + h * i;
      acc += std::abs(p_eval(x) - q_eval(x));
    }
    return 0.5 * h * acc;
  });
}

template <Density P, Density Q>
DivergenceReport tv_quadrature(P&& p_eval, Q&& q_eval, int grid_points) {
  QuadratureOptions opts;
  opts.grid_points = grid_points;
  return tv_quadrature(p_eval, q_eval, opts);
}

/// D_W1(p, q) = int |P - Q| over [-1, 1], with both CDFs accumulated by the
/// trapezoid rule on the same grid.
template <Density P, Density Q>
DivergenceReport w1_quadrature(P&& p_eval, Q&& q_eval, const QuadratureOptions& opts = {}) {
  return detail::refine_quadrature(opts, [&](int points) {
    const double h = 2.0 / points;
    double gap_prev = 0.0;  // P - Q at -1
    double diff_prev = p_eval(-1.0) - q_eval(-1.0);
    double acc = 0.0;
    for (int i = 1; i <= points; ++i) {
      const double x = -1.0 + h * i;
      // p and q are periodic; evaluate the right end at -1 to stay in the domain
      const double diff = (i == points) ? p_eval(-1.0) - q_eval(-1.0) : p_eval(x) - q_eval(x);
      const double gap = gap_prev + 0.5 * h * (diff_prev + diff);
      acc += 0.5 * h * (std::abs(gap_prev) + std::abs(gap));
      gap_prev = gap;
      diff_prev = diff;
    }
    return acc;
  });
}

// ---------------------------------------------------------------------------
// Sample-based estimators

/// D_KL(p || q) as the sample mean of log(p / max(q, floor)) over draws of p.
template <Density P, Density Q>
DivergenceReport kl_monte_carlo(std::span<const double> p_samples, P&& p_eval, Q&& q_eval) {
  if (p_samples.empty()) throw ParameterError("KL estimate needs at least one sample");
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double x : p_samples) {
    const double term = std::log(std::max(static_cast<double>(p_eval(x)), kDensityFloor)) -
                        std::log(std::max(static_cast<double>(q_eval(x)), kDensityFloor));
    ++n;
    const double delta = term - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (term - mean);
  }
  const double variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  if (!std::isfinite(mean)) throw NumericalError("KL estimate is not finite");
  return {mean, std::sqrt(variance / static_cast<double>(n)), EstimateMethod::monte_carlo};
}

namespace detail {

// `count` evenly spaced order statistics of a sorted sample.
inline std::vector<double> quantile_subsample(const std::vector<double>& sorted, std::size_t count) {
  std::vector<double> out(count);
  const double stride = static_cast<double>(sorted.size()) / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto idx = static_cast<std::size_t>((static_cast<double>(i) + 0.5) * stride);
    out[i] = sorted[std::min(idx, sorted.size() - 1)];
  }
  return out;
}

}  // namespace detail

/// W1 between two empirical distributions on the interval [-1, 1) (not the
/// circle) by matching order statistics. A larger set is reduced to the size
/// of the smaller one by taking evenly spaced order statistics.
inline DivergenceReport empirical_w1(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw ParameterError("empirical W1 needs non-empty sample sets");
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() > b.size()) a = detail::quantile_subsample(a, b.size());
  if (b.size() > a.size()) b = detail::quantile_subsample(b, a.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return {acc / static_cast<double>(a.size()), 0.0, EstimateMethod::empirical};
}

}  // namespace daas
