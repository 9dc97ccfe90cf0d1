#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

namespace daas::detail {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Unnormalized backward DFT: out[k] = sum_n in[n] exp(+2 pi i n k / K).
inline std::vector<std::complex<double>> backward_dft(std::span<const std::complex<double>> in) {
  const std::size_t size = in.size();
  std::vector<std::complex<double>> out(size);
  if (size == 0) return out;
  std::vector<std::complex<double>> work(in.begin(), in.end());
  auto* src = reinterpret_cast<fftw_complex*>(work.data());
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());

  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(size), src, dst, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace daas::detail
