#pragma once

// Cardinal B-spline interpolating densities w_D (centered Irwin-Hall laws),
// the compound density q they induce around the ancestor grid, and the
// discretized ancestral sampler built from both.

#include <cmath>
#include <cstdint>
#include <string>

#include "daas/ancestor.hpp"
#include "daas/circle.hpp"
#include "daas/errors.hpp"
#include "daas/fbm.hpp"
#include "daas/random.hpp"
#include "daas/sample_batch.hpp"

namespace daas {

/// B-spline degree D of the interpolating density. Only D in {0, 1, 2}.
class KernelSpec {
 public:
  explicit KernelSpec(int degree) : degree_(degree) {
    if (degree < 0 || degree > 2) {
      throw ParameterError("kernel degree D = " + std::to_string(degree) + " unsupported (expected 0, 1 or 2)");
    }
  }

  int degree() const { return degree_; }
  /// w_D vanishes outside [-half_width, half_width].
  double half_width() const { return 0.5 * (degree_ + 1); }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  int degree_;
};

inline double kernel_pdf(const KernelSpec& spec, double u) {
  switch (spec.degree()) {
    case 0:
      return (u >= -0.5 && u < 0.5) ? 1.0 : 0.0;
    case 1:
      return std::max(0.0, 1.0 - std::abs(u));
    default: {
      const double a = std::abs(u);
      if (a <= 0.5) return 0.75 - a * a;
      if (a <= 1.5) return 0.5 * (1.5 - a) * (1.5 - a);
      return 0.0;
    }
  }
}

/// Sum of D+1 independent uniforms on [-1/2, 1/2).
inline double sample_kernel(const KernelSpec& spec, Rng& rng) {
  double u = 0.0;
  for (int i = 0; i <= spec.degree(); ++i) u += rng.uniform() - 0.5;
  return u;
}

/// q(x) = sum_k (K/2) w_D((K/2)(x - x_k)) p[k], with kernels wrapped around the circle.
inline double compound_pdf(const AncestorPmf& pmf, const KernelSpec& spec, double x) {
  const int grid_size = pmf.size();
  const double half_k = 0.5 * grid_size;
  // Position in grid units; knot j sits at t = j and belongs to cell j mod K.
  const double t = (wrap(x) + 1.0) * half_k;
  const double reach = spec.half_width();
  const auto first = static_cast<long>(std::floor(t - reach));
  const auto last = static_cast<long>(std::ceil(t + reach));
  double total = 0.0;
  for (long j = first; j <= last; ++j) {
    const double w = kernel_pdf(spec, t - static_cast<double>(j));
    if (w == 0.0) continue;
    long cell = j % grid_size;
    if (cell < 0) cell += grid_size;
    total += w * pmf[static_cast<int>(cell)];
  }
  return half_k * total;
}

/// Ancestor plus kernel offset, wrapped to [-1, 1). Draws no model evaluations.
inline double daas_draw(const AliasTable& table, const KernelSpec& spec, Rng& rng) {
  const int grid_size = table.size();
  const int n = table.sample(rng);
  const double u = sample_kernel(spec, rng);
  return wrap(-1.0 + 2.0 / static_cast<double>(grid_size) * (static_cast<double>(n) + u));
}

/// Discretized approximate ancestral sampling. Bills exactly K pdf evaluations
/// whatever the sample count.
inline SampleBatch daas_sample(const FbmModel& model, int grid_size, const KernelSpec& spec, std::int64_t count,
                               Rng& rng, EvalCounter& counter) {
  require_grid_size(model, grid_size);
  if (count < 1) throw ParameterError("sample count S must be at least 1");
  EvalCounter spent;
  const AncestorPmf pmf = build_ancestor(model, grid_size, spent);
  const AliasTable table(pmf);

  SampleBatch batch;
  batch.seed = rng.seed();
  batch.samples.resize(static_cast<std::size_t>(count));
  for (auto& x : batch.samples) x = daas_draw(table, spec, rng);
  counter += spent;
  batch.evals = spent;
  return batch;
}

}  // namespace daas
