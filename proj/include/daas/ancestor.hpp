#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "daas/errors.hpp"
#include "daas/fbm.hpp"
#include "daas/random.hpp"

namespace daas {

/// Tolerance on the total mass of an ancestor PMF.
inline constexpr double kPmfSumTolerance = 1e-9;

/// Discrete ancestor distribution on the grid x_k = -1 + 2k/K.
class AncestorPmf {
 public:
  explicit AncestorPmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ParameterError("PMF must have at least one cell");
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw ParameterError("PMF entries must be finite and non-negative");
    }
    const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
    if (std::abs(total - 1.0) > kPmfSumTolerance) {
      throw ParameterError("PMF sums to " + std::to_string(total) + ", not 1");
    }
  }

  int size() const { return static_cast<int>(probs_.size()); }
  std::span<const double> probs() const { return probs_; }
  double operator[](int k) const { return probs_[static_cast<std::size_t>(k)]; }
  double step() const { return 2.0 / static_cast<double>(size()); }
  double point(int k) const { return grid_point(k, size()); }

 private:
  std::vector<double> probs_;
};

/// p[k] = (2/K) p(x_k). Bills exactly K pdf evaluations.
inline AncestorPmf build_ancestor(const FbmModel& model, int grid_size, EvalCounter& counter) {
  auto values = pdf_grid(model, grid_size, counter);
  const double weight = 2.0 / static_cast<double>(grid_size);
  for (auto& v : values) v *= weight;
  return AncestorPmf(std::move(values));
}

/// Walker alias table built with Vose's two-worklist construction.
class AliasTable {
 public:
  explicit AliasTable(const AncestorPmf& pmf) {
    const auto probs = pmf.probs();
    const std::size_t size = probs.size();
    prob_.assign(size, 1.0);
    alias_.resize(size);
    std::iota(alias_.begin(), alias_.end(), 0);

    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    std::vector<double> scaled(size);
    std::vector<int> small;
    std::vector<int> large;
    small.reserve(size);
    large.reserve(size);
    for (std::size_t k = 0; k < size; ++k) {
      scaled[k] = probs[k] * static_cast<double>(size) / total;
      (scaled[k] < 1.0 ? small : large).push_back(static_cast<int>(k));
    }
    while (!small.empty() && !large.empty()) {
      const int lo = small.back();
      small.pop_back();
      const int hi = large.back();
      large.pop_back();
      prob_[static_cast<std::size_t>(lo)] = scaled[static_cast<std::size_t>(lo)];
      alias_[static_cast<std::size_t>(lo)] = hi;
      auto& rest = scaled[static_cast<std::size_t>(hi)];
      rest = (rest + scaled[static_cast<std::size_t>(lo)]) - 1.0;
      (rest < 1.0 ? small : large).push_back(hi);
    }
    // Leftovers differ from 1 only by rounding.
    for (int k : large) prob_[static_cast<std::size_t>(k)] = 1.0;
    for (int k : small) prob_[static_cast<std::size_t>(k)] = 1.0;
  }

  int size() const { return static_cast<int>(prob_.size()); }
  std::span<const double> prob() const { return prob_; }
  std::span<const int> alias() const { return alias_; }

  /// Maps two uniforms on [0, 1) to a cell index: the first picks a column,
  /// the second flips the column's coin.
  int pick(double u_column, double u_coin) const {
    auto column = static_cast<std::size_t>(u_column * static_cast<double>(prob_.size()));
    if (column >= prob_.size()) column = prob_.size() - 1;
    return u_coin < prob_[column] ? static_cast<int>(column) : alias_[column];
  }

  int sample(Rng& rng) const {
    const double u_column = rng.uniform();
    const double u_coin = rng.uniform();
    return pick(u_column, u_coin);
  }

  /// PMF implied by the table.
  std::vector<double> reconstruct() const {
    const double share = 1.0 / static_cast<double>(prob_.size());
    std::vector<double> out(prob_.size(), 0.0);
    for (std::size_t k = 0; k < prob_.size(); ++k) {
      out[k] += prob_[k] * share;
      out[static_cast<std::size_t>(alias_[k])] += (1.0 - prob_[k]) * share;
    }
    return out;
  }

 private:
  std::vector<double> prob_;
  std::vector<int> alias_;
};

inline AliasTable build_alias(const AncestorPmf& pmf) { return AliasTable(pmf); }

inline int sample_ancestor(const AliasTable& table, Rng& rng) { return table.sample(rng); }

}  // namespace daas
