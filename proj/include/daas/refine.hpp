#pragma once

// Langevin refinement of circle-valued samples. Every update is wrapped back
// to [-1, 1); the MALA proposal density is evaluated on the minimal circular
// displacement, which ignores wrapped images carrying negligible mass for the
// small step sizes used here.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "daas/circle.hpp"
#include "daas/errors.hpp"
#include "daas/fbm.hpp"
#include "daas/random.hpp"
#include "daas/sample_batch.hpp"

namespace daas {

enum class StepSchedule { constant, decay };

inline const char* to_string(StepSchedule schedule) {
  return schedule == StepSchedule::constant ? "constant" : "decay";
}

struct LangevinConfig {
  double step_eps0 = 1e-5;
  StepSchedule schedule = StepSchedule::constant;
  int steps = 0;

  void validate() const {
    if (!(step_eps0 > 0.0) || !std::isfinite(step_eps0)) throw ParameterError("step size eps0 must be positive");
    if (steps < 0) throw ParameterError("step count T must be non-negative");
  }

  /// eps_t for t = 0, 1, ...; the decaying schedule is eps0 / (t + 1).
  double step_size(int t) const {
    return schedule == StepSchedule::constant ? step_eps0 : step_eps0 / static_cast<double>(t + 1);
  }
};

enum class LangevinKind { ula, mala };

/// Called with the number of completed steps and the current states.
using RefineObserver = std::function<void(int, std::span<const double>)>;

namespace detail {

inline void check_batch(const SampleBatch& batch) {
  for (double x : batch.samples) {
    if (!(x >= -1.0 && x < 1.0)) throw ParameterError("refinement input samples must lie in [-1, 1)");
  }
}

}  // namespace detail

/// Runs the chains step-major (all samples advance one step before the next),
/// so stopping after t steps reproduces a run configured with T = t exactly.
/// `observer` fires after every step listed in `checkpoints` (0 allowed).
inline SampleBatch langevin_refine(const FbmModel& model, const SampleBatch& batch, const LangevinConfig& cfg,
                                   LangevinKind kind, Rng& rng, EvalCounter& counter,
                                   std::span<const int> checkpoints = {}, const RefineObserver& observer = {}) {
  cfg.validate();
  detail::check_batch(batch);
  SampleBatch out = batch;
  out.acceptance_rate.reset();
  std::vector<double>& states = out.samples;
  EvalCounter spent;
  std::uint64_t accepted = 0;
  std::uint64_t proposals = 0;

  auto notify = [&](int done) {
    if (observer && std::find(checkpoints.begin(), checkpoints.end(), done) != checkpoints.end()) {
      observer(done, states);
    }
  };
  notify(0);

  for (int t = 0; t < cfg.steps; ++t) {
    const double eps = cfg.step_size(t);
    const double noise_scale = std::sqrt(2.0 * eps);
    if (kind == LangevinKind::ula) {
      for (double& x : states) {
        const double drift = eps * score(model, x, spent);
        x = wrap(x + drift + noise_scale * rng.normal());
      }
    } else {
      const double inv_four_eps = 1.0 / (4.0 * eps);
      for (double& x : states) {
        const auto here = log_density_and_score(model, x, spent);
        const double forward_mean = x + eps * here.score;
        const double proposal = wrap(forward_mean + noise_scale * rng.normal());
        const auto there = log_density_and_score(model, proposal, spent);
        const double forward = circular_difference(proposal, forward_mean);
        const double backward = circular_difference(x, proposal + eps * there.score);
        const double log_ratio = there.log_density - here.log_density -
                                 backward * backward * inv_four_eps + forward * forward * inv_four_eps;
        const double u = rng.uniform();
        ++proposals;
        if (log_ratio >= 0.0 || u < std::exp(log_ratio)) {
          x = proposal;
          ++accepted;
        }
      }
    }
    notify(t + 1);
  }

  if (kind == LangevinKind::mala && proposals > 0) {
    out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposals);
  }
  counter += spent;
  out.evals += spent;
  return out;
}

/// x <- wrap(x + eps_t score(x) + sqrt(2 eps_t) z). Bills 2 model evaluations per sample per step.
inline SampleBatch ula_refine(const FbmModel& model, const SampleBatch& batch, const LangevinConfig& cfg, Rng& rng,
                              EvalCounter& counter) {
  return langevin_refine(model, batch, cfg, LangevinKind::ula, rng, counter);
}

/// ULA proposal plus Metropolis-Hastings correction. Bills 4 model evaluations
/// per sample per step (score at the current state and at the proposal).
inline SampleBatch mala_refine(const FbmModel& model, const SampleBatch& batch, const LangevinConfig& cfg, Rng& rng,
                               EvalCounter& counter) {
  return langevin_refine(model, batch, cfg, LangevinKind::mala, rng, counter);
}

}  // namespace daas
