#pragma once

// Experiment harness behind the command-line tool: a flat key=value
// configuration, and the sample / convergence / refinement / cost commands.
// Every command is a pure function of its configuration.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "daas/ancestor.hpp"
#include "daas/baselines.hpp"
#include "daas/errors.hpp"
#include "daas/fbm.hpp"
#include "daas/kernels.hpp"
#include "daas/random.hpp"
#include "daas/refine.hpp"
#include "daas/sample_batch.hpp"

namespace daas {

/// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

enum class SampleMethod { daas, daas_ula, daas_mala, rejection, inverse };

inline const char* to_string(SampleMethod method) {
  switch (method) {
    case SampleMethod::daas:
      return "daas";
    case SampleMethod::daas_ula:
      return "daas+ula";
    case SampleMethod::daas_mala:
      return "daas+mala";
    case SampleMethod::rejection:
      return "rejection";
    default:
      return "inverse";
  }
}

struct ExperimentConfig {
  std::uint64_t seed = 0;
  int degree = 10;                   // N
  int grid_size = 50;                // K
  std::vector<int> grid_sweep;       // K values for `convergence`
  int kernel_degree = 1;             // D
  std::vector<int> kernel_sweep;     // D values for `convergence`
  std::int64_t samples = 1000;       // S
  int steps = 0;                     // T
  std::vector<int> step_sweep;       // T values for `refinement`
  double eps_ula = 1e-5;
  double eps_mala = 8e-5;
  StepSchedule schedule = StepSchedule::constant;
  SampleMethod method = SampleMethod::daas;
  int trials = 1;
  std::int64_t reference_size = 0;   // rejection reference for `refinement`; 0 means S
  double tol = 1e-10;                // bisection tolerance for `inverse`
  std::string model_path;            // optional model file; random model otherwise

  std::int64_t reference_samples() const { return reference_size > 0 ? reference_size : samples; }
  std::vector<int> grids() const { return grid_sweep.empty() ? std::vector<int>{grid_size} : grid_sweep; }
  std::vector<int> kernels() const { return kernel_sweep.empty() ? std::vector<int>{kernel_degree} : kernel_sweep; }
  std::vector<int> step_counts() const {
    if (!step_sweep.empty()) return step_sweep;
    return steps == 0 ? std::vector<int>{0} : std::vector<int>{0, steps};
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key + ": '" + text + "' is not an integer");
  return value;
}

inline double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key + ": '" + text + "' is not a number");
  return value;
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  if (trim(text).empty()) return out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_int<int>(key, trim(item)));
  return out;
}

inline std::string join(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

inline std::string format_double(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

}  // namespace detail

/// Assigns one `key=value` setting. Unknown keys and malformed values throw ConfigError.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = detail::trim(raw);
  if (key == "seed") {
    cfg.seed = detail::parse_int<std::uint64_t>(key, value);
  } else if (key == "N") {
    cfg.degree = detail::parse_int<int>(key, value);
  } else if (key == "K") {
    cfg.grid_size = detail::parse_int<int>(key, value);
  } else if (key == "ks") {
    cfg.grid_sweep = detail::parse_int_list(key, value);
  } else if (key == "D") {
    cfg.kernel_degree = detail::parse_int<int>(key, value);
  } else if (key == "degrees") {
    cfg.kernel_sweep = detail::parse_int_list(key, value);
  } else if (key == "S") {
    cfg.samples = detail::parse_int<std::int64_t>(key, value);
  } else if (key == "T") {
    cfg.steps = detail::parse_int<int>(key, value);
  } else if (key == "ts") {
    cfg.step_sweep = detail::parse_int_list(key, value);
  } else if (key == "eps_ula") {
    cfg.eps_ula = detail::parse_double(key, value);
  } else if (key == "eps_mala") {
    cfg.eps_mala = detail::parse_double(key, value);
  } else if (key == "schedule") {
    if (value == "constant") {
      cfg.schedule = StepSchedule::constant;
    } else if (value == "decay") {
      cfg.schedule = StepSchedule::decay;
    } else {
      throw ConfigError("schedule: expected 'constant' or 'decay', got '" + value + "'");
    }
  } else if (key == "method") {
    static const std::map<std::string, SampleMethod> names{{"daas", SampleMethod::daas},
                                                           {"daas+ula", SampleMethod::daas_ula},
                                                           {"daas+mala", SampleMethod::daas_mala},
                                                           {"rejection", SampleMethod::rejection},
                                                           {"inverse", SampleMethod::inverse}};
    const auto it = names.find(value);
    if (it == names.end()) throw ConfigError("method: unknown sampler '" + value + "'");
    cfg.method = it->second;
  } else if (key == "trials") {
    cfg.trials = detail::parse_int<int>(key, value);
  } else if (key == "reference") {
    cfg.reference_size = detail::parse_int<std::int64_t>(key, value);
  } else if (key == "tol") {
    cfg.tol = detail::parse_double(key, value);
  } else if (key == "model") {
    cfg.model_path = value;
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

/// Applies a single `key=value` assignment.
inline void apply_assignment(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  apply_setting(cfg, detail::trim(assignment.substr(0, eq)), std::string(assignment.substr(eq + 1)));
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg = {}) {
  std::string line;
  while (std::getline(in, line)) {
    const std::string text = detail::trim(line.substr(0, line.find('#')));
    if (text.empty()) continue;
    apply_assignment(cfg, text);
  }
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

/// Canonical text form; parse_config(to_text(cfg)) == cfg.
inline std::string to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "seed=" << cfg.seed << '\n'
      << "N=" << cfg.degree << '\n'
      << "K=" << cfg.grid_size << '\n'
      << "ks=" << detail::join(cfg.grid_sweep) << '\n'
      << "D=" << cfg.kernel_degree << '\n'
      << "degrees=" << detail::join(cfg.kernel_sweep) << '\n'
      << "S=" << cfg.samples << '\n'
      << "T=" << cfg.steps << '\n'
      << "ts=" << detail::join(cfg.step_sweep) << '\n'
      << "eps_ula=" << detail::format_double(cfg.eps_ula) << '\n'
      << "eps_mala=" << detail::format_double(cfg.eps_mala) << '\n'
      << "schedule=" << to_string(cfg.schedule) << '\n'
      << "method=" << to_string(cfg.method) << '\n'
      << "trials=" << cfg.trials << '\n'
      << "reference=" << cfg.reference_size << '\n'
      << "tol=" << detail::format_double(cfg.tol) << '\n'
      << "model=" << cfg.model_path << '\n';
  return out.str();
}

enum class Command { sample, convergence, refinement, cost };

/// Checks the constraints a command relies on; the message names the violated one.
inline void validate(const ExperimentConfig& cfg, Command command) {
  auto fail = [](const std::string& message) { throw ConfigError(message); };
  if (cfg.degree < 0) fail("N must be >= 0 (N=" + std::to_string(cfg.degree) + ")");
  if (cfg.samples < 1) fail("S must be >= 1 (S=" + std::to_string(cfg.samples) + ")");
  if (cfg.trials < 1) fail("trials must be >= 1 (trials=" + std::to_string(cfg.trials) + ")");
  if (cfg.steps < 0) fail("T must be >= 0 (T=" + std::to_string(cfg.steps) + ")");
  if (!(cfg.eps_ula > 0.0)) fail("eps_ula must be > 0");
  if (!(cfg.eps_mala > 0.0)) fail("eps_mala must be > 0");
  if (!(cfg.tol > 0.0)) fail("tol must be > 0");
  // The grid constraint is checked against the model actually used; a model
  // file may carry a different N.
  const int min_k = min_grid_size(cfg.degree);
  auto check_grid = [&](int k) {
    if (k < min_k) {
      fail("K must be >= 2N+1 (K=" + std::to_string(k) + ", N=" + std::to_string(cfg.degree) + ")");
    }
  };
  auto check_kernel = [&](int d) {
    if (d < 0 || d > 2) fail("D must be 0, 1 or 2 (D=" + std::to_string(d) + ")");
  };
  const bool uses_grid = command != Command::sample ||
                         (cfg.method != SampleMethod::rejection && cfg.method != SampleMethod::inverse);
  if (uses_grid && cfg.model_path.empty()) {
    for (int k : cfg.grids()) check_grid(k);
  }
  for (int d : cfg.kernels()) check_kernel(d);
  if (command == Command::convergence) {
    const auto ks = cfg.grids();
    for (std::size_t i = 1; i < ks.size(); ++i) {
      if (ks[i] <= ks[i - 1]) fail("K sweep must be strictly increasing (ks=" + detail::join(ks) + ")");
    }
  }
  if (command == Command::refinement) {
    if (cfg.reference_samples() < cfg.samples) {
      fail("rejection reference size must be >= S (reference=" + std::to_string(cfg.reference_samples()) +
           ", S=" + std::to_string(cfg.samples) + ")");
    }
    const auto ts = cfg.step_counts();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i] < 0) fail("T values must be >= 0 (ts=" + detail::join(ts) + ")");
      if (i > 0 && ts[i] <= ts[i - 1]) fail("T sweep must be strictly increasing (ts=" + detail::join(ts) + ")");
    }
  }
}

/// Model for one trial: the model file if given, otherwise random_model(N) seeded with seed + trial.
inline FbmModel trial_model(const ExperimentConfig& cfg, int trial) {
  if (!cfg.model_path.empty()) {
    std::ifstream in(cfg.model_path);
    if (!in) throw ConfigError("cannot open model file '" + cfg.model_path + "'");
    return read_model(in);
  }
  Rng rng(cfg.seed + static_cast<std::uint64_t>(trial));
  return random_model(cfg.degree, rng);
}

/// Sampling stream `stream` of trial `trial`, independent of the model draw.
inline Rng trial_stream(const ExperimentConfig& cfg, int trial, std::uint64_t stream) {
  return Rng(cfg.seed + static_cast<std::uint64_t>(trial), stream);
}

// Stream ids within a trial.
inline constexpr std::uint64_t kReferenceStream = 1;
inline constexpr std::uint64_t kAncestralStream = 2;
inline constexpr std::uint64_t kUlaStream = 3;
inline constexpr std::uint64_t kMalaStream = 4;

// ---------------------------------------------------------------------------
// sample

inline SampleBatch run_sample(const ExperimentConfig& cfg) {
  validate(cfg, Command::sample);
  const FbmModel model = trial_model(cfg, 0);
  EvalCounter counter;
  switch (cfg.method) {
    case SampleMethod::rejection: {
      Rng rng = trial_stream(cfg, 0, kReferenceStream);
      return rejection_sample(model, cfg.samples, rng, counter);
    }
    case SampleMethod::inverse: {
      Rng rng = trial_stream(cfg, 0, kReferenceStream);
      return inverse_transform_sample(model, cfg.samples, rng, cfg.tol);
    }
    default:
      break;
  }
  Rng rng = trial_stream(cfg, 0, kAncestralStream);
  SampleBatch batch = daas_sample(model, cfg.grid_size, KernelSpec(cfg.kernel_degree), cfg.samples, rng, counter);
  if (cfg.method == SampleMethod::daas) return batch;
  const bool mala = cfg.method == SampleMethod::daas_mala;
  LangevinConfig lc{mala ? cfg.eps_mala : cfg.eps_ula, cfg.schedule, cfg.steps};
  Rng chain_rng = trial_stream(cfg, 0, mala ? kMalaStream : kUlaStream);
  SampleBatch refined =
      langevin_refine(model, batch, lc, mala ? LangevinKind::mala : LangevinKind::ula, chain_rng, counter);
  refined.seed = cfg.seed;
  return refined;
}

/// Manifest comment lines followed by one sample per line.
inline void write_sample_csv(std::ostream& out, const ExperimentConfig& cfg, const SampleBatch& batch) {
  out << "# seed=" << cfg.seed << " K=" << cfg.grid_size << " D=" << cfg.kernel_degree << " S=" << cfg.samples
      << '\n';
  out << "# method=" << to_string(cfg.method) << " N=" << cfg.degree << " T=" << cfg.steps
      << " schedule=" << to_string(cfg.schedule) << '\n';
  out << "# pdf_evals=" << batch.evals.pdf_evals << " score_evals=" << batch.evals.score_evals
      << " model_evals=" << batch.evals.model_evals() << '\n';
  if (batch.acceptance_rate) {
    out << "# acceptance_rate=" << detail::format_double(*batch.acceptance_rate) << '\n';
  }
  write_samples(out, batch);
}

inline void cmd_sample(const ExperimentConfig& cfg, std::ostream& out) {
  write_sample_csv(out, cfg, run_sample(cfg));
}

// ---------------------------------------------------------------------------
// convergence

struct ConvergenceRow {
  int grid_size;
  int trial;
  int kernel_degree;
  DivergenceReport kl;
};

/// D_KL(p || q) for every (trial, K, D); samples of p come from rejection sampling.
inline std::vector<ConvergenceRow> convergence_rows(const ExperimentConfig& cfg) {
  validate(cfg, Command::convergence);
  std::vector<ConvergenceRow> rows;
  const auto ks = cfg.grids();
  const auto ds = cfg.kernels();
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const FbmModel model = trial_model(cfg, trial);
    Rng rng = trial_stream(cfg, trial, kReferenceStream);
    EvalCounter counter;
    const SampleBatch reference = rejection_sample(model, cfg.samples, rng, counter);
    EvalCounter scoring;
    auto p_eval = [&](double x) { return pdf(model, x, scoring); };
    for (int k : ks) {
      require_grid_size(model, k);
      const AncestorPmf pmf = build_ancestor(model, k, counter);
      for (int d : ds) {
        const KernelSpec spec(d);
        const auto report =
            kl_monte_carlo(reference.samples, p_eval, [&](double x) { return compound_pdf(pmf, spec, x); });
        rows.push_back({k, trial, d, report});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const ConvergenceRow& a, const ConvergenceRow& b) {
    return std::tie(a.grid_size, a.trial, a.kernel_degree) < std::tie(b.grid_size, b.trial, b.kernel_degree);
  });
  return rows;
}

inline void cmd_convergence(const ExperimentConfig& cfg, std::ostream& out) {
  const auto rows = convergence_rows(cfg);
  out << "# seed=" << cfg.seed << " N=" << cfg.degree << " S=" << cfg.samples << " trials=" << cfg.trials << '\n';
  out << std::setprecision(17);
  for (const auto& row : rows) {
    out << row.grid_size << ',' << row.trial << ',' << row.kernel_degree << ',' << row.kl.estimate << '\n';
  }
}

// ---------------------------------------------------------------------------
// refinement

struct RefinementRow {
  int steps;
  std::string method;  // "none", "ula" or "mala"
  std::vector<double> w1_per_trial;

  double median() const {
    std::vector<double> v = w1_per_trial;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  }
};

/// Empirical W1 against a rejection reference after T refinement steps, for
/// each T in the sweep. T = 0 is plain ancestral sampling ("none").
inline std::vector<RefinementRow> refinement_rows(const ExperimentConfig& cfg) {
  validate(cfg, Command::refinement);
  const auto ts = cfg.step_counts();
  const int max_steps = ts.back();
  std::vector<RefinementRow> rows;
  auto row_for = [&](int t, const std::string& method) -> RefinementRow& {
    for (auto& row : rows) {
      if (row.steps == t && row.method == method) return row;
    }
    rows.push_back({t, method, {}});
    return rows.back();
  };

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const FbmModel model = trial_model(cfg, trial);
    EvalCounter counter;
    Rng ref_rng = trial_stream(cfg, trial, kReferenceStream);
    const SampleBatch reference = rejection_sample(model, cfg.reference_samples(), ref_rng, counter);
    Rng daas_rng = trial_stream(cfg, trial, kAncestralStream);
    const SampleBatch start =
        daas_sample(model, cfg.grid_size, KernelSpec(cfg.kernel_degree), cfg.samples, daas_rng, counter);

    if (std::find(ts.begin(), ts.end(), 0) != ts.end()) {
      row_for(0, "none").w1_per_trial.push_back(empirical_w1(start.samples, reference.samples).estimate);
    }
    if (max_steps == 0) continue;
    for (const auto kind : {LangevinKind::ula, LangevinKind::mala}) {
      const bool mala = kind == LangevinKind::mala;
      const std::string name = mala ? "mala" : "ula";
      LangevinConfig lc{mala ? cfg.eps_mala : cfg.eps_ula, cfg.schedule, max_steps};
      Rng chain_rng = trial_stream(cfg, trial, mala ? kMalaStream : kUlaStream);
      langevin_refine(model, start, lc, kind, chain_rng, counter, ts, [&](int done, std::span<const double> xs) {
        if (done == 0) return;
        row_for(done, name).w1_per_trial.push_back(empirical_w1(xs, reference.samples).estimate);
      });
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const RefinementRow& a, const RefinementRow& b) {
    auto rank = [](const std::string& m) { return m == "none" ? 0 : (m == "ula" ? 1 : 2); };
    return std::make_pair(a.steps, rank(a.method)) < std::make_pair(b.steps, rank(b.method));
  });
  return rows;
}

/// Rows `T,method,w1`, with w1 the median over trials.
inline void cmd_refinement(const ExperimentConfig& cfg, std::ostream& out) {
  const auto rows = refinement_rows(cfg);
  out << "# seed=" << cfg.seed << " N=" << cfg.degree << " K=" << cfg.grid_size << " D=" << cfg.kernel_degree
      << " S=" << cfg.samples << " reference=" << cfg.reference_samples() << " trials=" << cfg.trials
      << " eps_ula=" << detail::format_double(cfg.eps_ula) << " eps_mala=" << detail::format_double(cfg.eps_mala)
      << " schedule=" << to_string(cfg.schedule) << '\n';
  out << std::setprecision(17);
  for (const auto& row : rows) out << row.steps << ',' << row.method << ',' << row.median() << '\n';
}

// ---------------------------------------------------------------------------
// cost

struct CostRow {
  std::string method;
  EvalCounter evals;
};

/// Evaluation ledgers for drawing S samples with each method, from real runs.
inline std::vector<CostRow> cost_rows(const ExperimentConfig& cfg) {
  validate(cfg, Command::cost);
  const FbmModel model = trial_model(cfg, 0);
  std::vector<CostRow> rows;

  {
    EvalCounter counter;
    Rng rng = trial_stream(cfg, 0, kReferenceStream);
    rejection_sample(model, cfg.samples, rng, counter);
    rows.push_back({"rejection", counter});
  }
  for (const auto kind : {LangevinKind::ula, LangevinKind::mala}) {
    const bool mala = kind == LangevinKind::mala;
    EvalCounter counter;
    Rng rng = trial_stream(cfg, 0, kAncestralStream);
    const SampleBatch start = daas_sample(model, cfg.grid_size, KernelSpec(1), cfg.samples, rng, counter);
    LangevinConfig lc{mala ? cfg.eps_mala : cfg.eps_ula, cfg.schedule, cfg.steps};
    Rng chain_rng = trial_stream(cfg, 0, mala ? kMalaStream : kUlaStream);
    langevin_refine(model, start, lc, kind, chain_rng, counter);
    rows.push_back({mala ? "mala" : "ula", counter});
  }
  {
    EvalCounter counter;
    Rng rng = trial_stream(cfg, 0, kAncestralStream);
    daas_sample(model, cfg.grid_size, KernelSpec(1), cfg.samples, rng, counter);
    rows.push_back({"triangular", counter});
  }
  return rows;
}

/// Rows `method,model_evals,pdf_evals,score_evals`.
inline void cmd_cost(const ExperimentConfig& cfg, std::ostream& out) {
  const auto rows = cost_rows(cfg);
  out << "# seed=" << cfg.seed << " N=" << cfg.degree << " K=" << cfg.grid_size << " S=" << cfg.samples
      << " T=" << cfg.steps << '\n';
  for (const auto& row : rows) {
    out << row.method << ',' << row.evals.model_evals() << ',' << row.evals.pdf_evals << ','
        << row.evals.score_evals << '\n';
  }
}

}  // namespace daas
