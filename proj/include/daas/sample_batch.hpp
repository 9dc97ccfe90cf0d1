#pragma once

#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <vector>

#include "daas/fbm.hpp"

namespace daas {

/// Circle-valued samples plus the seed and evaluation ledger that produced them.
struct SampleBatch {
  std::vector<double> samples;
  std::uint64_t seed = 0;
  EvalCounter evals;
  /// Set by samplers with an accept/reject step (MALA, rejection).
  std::optional<double> acceptance_rate;

  std::size_t size() const { return samples.size(); }
};

/// One sample per line at round-trip precision.
inline void write_samples(std::ostream& out, const SampleBatch& batch) {
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (double x : batch.samples) out << x << '\n';
  out.precision(precision);
}

}  // namespace daas
