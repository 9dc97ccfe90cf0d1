#pragma once

// Fourier basis density model: a non-negative truncated Fourier series on the
// circle [-1, 1), parameterized through the autocorrelation of a free complex
// amplitude sequence.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "daas/detail/fft.hpp"
#include "daas/errors.hpp"
#include "daas/random.hpp"

namespace daas {

using Complex = std::complex<double>;

/// Lower clamp applied to density values before they are divided by or logged.
inline constexpr double kDensityFloor = 1e-12;

/// Grid sizes at or below this are evaluated term-wise instead of by FFT.
inline constexpr int kDirectGridThreshold = 32;

/// Ledger of model evaluations spent by a sampling run.
struct EvalCounter {
  std::uint64_t pdf_evals = 0;
  std::uint64_t score_evals = 0;

  /// A score evaluation needs p and p' and is billed as two model evaluations.
  std::uint64_t model_evals() const { return pdf_evals + 2 * score_evals; }

  EvalCounter& operator+=(const EvalCounter& other) {
    pdf_evals += other.pdf_evals;
    score_evals += other.score_evals;
    return *this;
  }
  friend EvalCounter operator+(EvalCounter a, const EvalCounter& b) { return a += b; }
  friend EvalCounter operator-(const EvalCounter& a, const EvalCounter& b) {
    return {a.pdf_evals - b.pdf_evals, a.score_evals - b.score_evals};
  }
  friend bool operator==(const EvalCounter&, const EvalCounter&) = default;
};

/// c[n] = sum_{k=0}^{N-n} a[k] conj(a[k+n]) for n = 0..N.
inline std::vector<Complex> autocorrelation(std::span<const Complex> a) {
  const std::size_t size = a.size();
  std::vector<Complex> c(size);
  for (std::size_t n = 0; n < size; ++n) {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k + n < size; ++k) acc += a[k] * std::conj(a[k + n]);
    c[n] = acc;
  }
  return c;
}

/// Immutable FBM. Only non-negative frequencies are stored; c[-n] = conj(c[n]).
class FbmModel {
 public:
  explicit FbmModel(std::vector<Complex> amplitudes, double scale_s = 1.0, double offset_t = 0.0)
      : amplitudes_(std::move(amplitudes)), scale_(scale_s), offset_(offset_t) {
    if (amplitudes_.empty()) throw ParameterError("amplitude sequence must be non-empty");
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw ParameterError("scale_s must be positive");
    if (!std::isfinite(offset_)) throw ParameterError("offset_t must be finite");
    for (const auto& a : amplitudes_) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw ParameterError("amplitudes must be finite");
      }
    }
    coefficients_ = autocorrelation(amplitudes_);
    const double c0 = coefficients_[0].real();
    if (!(c0 > 0.0)) throw ParameterError("all-zero amplitudes define no density (Z = 0)");
    // c0 is a sum of |a_k|^2; drop the rounding-level imaginary part.
    coefficients_[0] = Complex{c0, 0.0};
    ratios_.resize(coefficients_.size());
    for (std::size_t n = 0; n < coefficients_.size(); ++n) ratios_[n] = coefficients_[n] / c0;
  }

  /// Number of frequency terms N.
  int degree() const { return static_cast<int>(amplitudes_.size()) - 1; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<const Complex> coefficients() const { return coefficients_; }
  /// c[n] / c[0], n = 0..N.
  std::span<const Complex> ratios() const { return ratios_; }
  double c0() const { return coefficients_[0].real(); }
  /// Normalization constant Z = 2 c0 of the unnormalized series.
  double normalizer() const { return 2.0 * c0(); }
  double scale() const { return scale_; }
  double offset() const { return offset_; }

 private:
  std::vector<Complex> amplitudes_;
  std::vector<Complex> coefficients_;
  std::vector<Complex> ratios_;
  double scale_;
  double offset_;
};

inline FbmModel build_model(std::vector<Complex> amplitudes, double scale_s = 1.0, double offset_t = 0.0) {
  return FbmModel(std::move(amplitudes), scale_s, offset_t);
}

/// Amplitudes with i.i.d. standard-normal real and imaginary parts.
inline FbmModel random_model(int degree, Rng& rng) {
  if (degree < 0) throw ParameterError("N must be non-negative");
  std::vector<Complex> a(static_cast<std::size_t>(degree) + 1);
  for (auto& value : a) {
    const double re = rng.normal();
    const double im = rng.normal();
    value = Complex{re, im};
  }
  return FbmModel(std::move(a));
}

/// Density value and its first two derivatives at one point, unclamped.
struct LocalExpansion {
  double value;
  double slope;
  double curvature;
};

namespace detail {

// Horner evaluation of sum_{n=1}^N r_n z^n together with sum n r_n z^n.
struct SeriesPair {
  Complex plain;
  Complex weighted;
};

inline SeriesPair horner_pair(std::span<const Complex> ratios, Complex z) {
  const std::size_t top = ratios.size() - 1;
  if (top == 0) return {Complex{}, Complex{}};
  Complex plain = ratios[top];
  Complex weighted = static_cast<double>(top) * ratios[top];
  for (std::size_t n = top - 1; n >= 1; --n) {
    plain = plain * z + ratios[n];
    weighted = weighted * z + static_cast<double>(n) * ratios[n];
  }
  return {plain * z, weighted * z};
}

inline Complex unit_phase(double x) {
  const double angle = std::numbers::pi * x;
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace detail

/// p(x) without the non-negativity clamp and without billing.
inline double pdf_unclamped(const FbmModel& model, double x) {
  const auto ratios = model.ratios();
  const std::size_t top = ratios.size() - 1;
  if (top == 0) return 0.5;
  const Complex z = detail::unit_phase(x);
  Complex acc = ratios[top];
  for (std::size_t n = top - 1; n >= 1; --n) acc = acc * z + ratios[n];
  return 0.5 + (acc * z).real();
}

/// p(x) = 1/2 + sum_n Re{(c_n / c_0) exp(i pi n x)}, clamped at kDensityFloor.
inline double pdf(const FbmModel& model, double x, EvalCounter& counter) {
  ++counter.pdf_evals;
  return std::max(pdf_unclamped(model, x), kDensityFloor);
}

/// p, p', p'' by term-wise differentiation. Not billed.
inline LocalExpansion local_expansion(const FbmModel& model, double x) {
  const auto ratios = model.ratios();
  double value = 0.5;
  double slope = 0.0;
  double curvature = 0.0;
  const Complex z = detail::unit_phase(x);
  Complex power = z;
  for (std::size_t n = 1; n < ratios.size(); ++n) {
    const double freq = std::numbers::pi * static_cast<double>(n);
    const Complex term = ratios[n] * power;
    value += term.real();
    // d/dx e^{i pi n x} = i pi n e^{i pi n x}
    slope += -freq * term.imag();
    curvature += -freq * freq * term.real();
    power *= z;
  }
  return {value, slope, curvature};
}

/// Score p'(x) / max(p(x), floor).
inline double score(const FbmModel& model, double x, EvalCounter& counter) {
  ++counter.score_evals;
  const auto pair = detail::horner_pair(model.ratios(), detail::unit_phase(x));
  const double value = std::max(0.5 + pair.plain.real(), kDensityFloor);
  // Re{i pi w} = -pi Im{w}
  const double slope = -std::numbers::pi * pair.weighted.imag();
  return slope / value;
}

/// Log-density and score from one coefficient pass (billed as one score evaluation).
struct LogDensityScore {
  double log_density;
  double score;
};

inline LogDensityScore log_density_and_score(const FbmModel& model, double x, EvalCounter& counter) {
  ++counter.score_evals;
  const auto pair = detail::horner_pair(model.ratios(), detail::unit_phase(x));
  const double value = std::max(0.5 + pair.plain.real(), kDensityFloor);
  const double slope = -std::numbers::pi * pair.weighted.imag();
  return {std::log(value), slope / value};
}

/// CDF on [-1, 1] by term-wise integration of the series.
inline double cdf(const FbmModel& model, double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const auto ratios = model.ratios();
  double total = 0.5 * (x + 1.0);
  const Complex z = detail::unit_phase(x);
  Complex power = z;
  for (std::size_t n = 1; n < ratios.size(); ++n) {
    const double freq = std::numbers::pi * static_cast<double>(n);
    const double start = (n % 2 == 0) ? 1.0 : -1.0;  // exp(-i pi n)
    total += (ratios[n] / Complex{0.0, freq} * (power - start)).real();
    power *= z;
  }
  return std::clamp(total, 0.0, 1.0);
}

/// Smallest grid size accepted for a model of degree N.
inline int min_grid_size(int degree) { return 2 * degree + 1; }

inline void require_grid_size(const FbmModel& model, int grid_size) {
  if (grid_size < min_grid_size(model.degree())) {
    throw ParameterError("K = " + std::to_string(grid_size) + " is below the minimum 2N+1 = " +
                         std::to_string(min_grid_size(model.degree())));
  }
}

/// Grid point x_k = -1 + 2k/K.
inline double grid_point(int k, int grid_size) {
  return -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(grid_size);
}

namespace detail {

// out[k] = Re sum_{n=1}^{N} weights[n] exp(i pi n x_k), x_k = -1 + 2k/K.
// Since exp(i pi n x_k) = (-1)^n exp(2 pi i n k / K), this is a zero-padded
// backward DFT of (-1)^n weights[n].
inline std::vector<double> grid_series(std::span<const Complex> weights, int grid_size) {
  const auto size = static_cast<std::size_t>(grid_size);
  std::vector<double> out(size, 0.0);
  if (weights.size() <= 1) return out;
  if (grid_size <= kDirectGridThreshold) {
    for (int k = 0; k < grid_size; ++k) {
      const Complex z = unit_phase(grid_point(k, grid_size));
      Complex power = z;
      double acc = 0.0;
      for (std::size_t n = 1; n < weights.size(); ++n) {
        acc += (weights[n] * power).real();
        power *= z;
      }
      out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
  }
  std::vector<Complex> padded(size, Complex{});
  for (std::size_t n = 1; n < weights.size(); ++n) {
    padded[n] = (n % 2 == 0) ? weights[n] : -weights[n];
  }
  const auto spectrum = backward_dft(padded);
  for (std::size_t k = 0; k < size; ++k) out[k] = spectrum[k].real();
  return out;
}

}  // namespace detail

/// Unclamped p(x_k) on the K-point grid. Not billed.
inline std::vector<double> pdf_grid_unclamped(const FbmModel& model, int grid_size) {
  require_grid_size(model, grid_size);
  auto values = detail::grid_series(model.ratios(), grid_size);
  for (auto& v : values) v += 0.5;
  return values;
}

/// p(x_k) at x_k = -1 + 2k/K, k = 0..K-1, in O(K log K). Bills K pdf evaluations.
inline std::vector<double> pdf_grid(const FbmModel& model, int grid_size, EvalCounter& counter) {
  auto values = pdf_grid_unclamped(model, grid_size);
  for (auto& v : values) v = std::max(v, kDensityFloor);
  counter.pdf_evals += static_cast<std::uint64_t>(grid_size);
  return values;
}

/// p'(x_k) on the K-point grid. Not billed.
inline std::vector<double> slope_grid(const FbmModel& model, int grid_size) {
  require_grid_size(model, grid_size);
  const auto ratios = model.ratios();
  std::vector<Complex> weights(ratios.size());
  for (std::size_t n = 1; n < ratios.size(); ++n) {
    weights[n] = ratios[n] * Complex{0.0, std::numbers::pi * static_cast<double>(n)};
  }
  return detail::grid_series(weights, grid_size);
}

/// Analytic sup-norm bounds on |p'| and |p''| that follow from |c_n| <= c_0.
struct DerivativeBounds {
  double slope;
  double curvature;
};

inline DerivativeBounds derivative_bounds(int degree) {
  const double n = degree;
  return {std::numbers::pi * n * (n + 1.0) / 2.0,
          std::numbers::pi * std::numbers::pi * n * (n + 1.0) * (2.0 * n + 1.0) / 6.0};
}

inline DerivativeBounds derivative_bounds(const FbmModel& model) { return derivative_bounds(model.degree()); }

/// Map a circle coordinate onto the real line: s * atanh(x) + t.
inline double to_real_line(double x, double scale_s, double offset_t) {
  if (!(x > -1.0 && x < 1.0)) throw DomainError("to_real_line requires x strictly inside (-1, 1)");
  return scale_s * std::atanh(x) + offset_t;
}

inline double to_real_line(const FbmModel& model, double x) {
  return to_real_line(x, model.scale(), model.offset());
}

/// Text form: "N s t" followed by N+1 lines "re(a_k) im(a_k)".
inline void write_model(std::ostream& out, const FbmModel& model) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << model.degree() << ' ' << model.scale() << ' ' << model.offset() << '\n';
  for (const auto& a : model.amplitudes()) out << a.real() << ' ' << a.imag() << '\n';
  out.flags(flags);
  out.precision(precision);
}

inline FbmModel read_model(std::istream& in) {
  int degree = -1;
  double scale_s = 0.0;
  double offset_t = 0.0;
  if (!(in >> degree >> scale_s >> offset_t) || degree < 0) {
    throw ParameterError("model file: expected header line 'N s t'");
  }
  std::vector<Complex> a(static_cast<std::size_t>(degree) + 1);
  for (std::size_t k = 0; k < a.size(); ++k) {
    double re = 0.0;
    double im = 0.0;
    if (!(in >> re >> im)) {
      throw ParameterError("model file: expected " + std::to_string(a.size()) + " amplitude lines, got " +
                           std::to_string(k));
    }
    a[k] = Complex{re, im};
  }
  return FbmModel(std::move(a), scale_s, offset_t);
}

}  // namespace daas
