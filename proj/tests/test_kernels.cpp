#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "daas/kernels.hpp"
#include "support/oracles.hpp"

namespace daas {
namespace {

TEST(KernelSpec, SupportedDegrees) {
  EXPECT_NO_THROW(KernelSpec(0));
  EXPECT_NO_THROW(KernelSpec(2));
  EXPECT_THROW(KernelSpec(3), ParameterError);
  EXPECT_THROW(KernelSpec(-1), ParameterError);
  EXPECT_DOUBLE_EQ(KernelSpec(2).half_width(), 1.5);
}

TEST(KernelPdf, Examples) {
  EXPECT_EQ(kernel_pdf(KernelSpec(1), 0.0), 1.0);
  EXPECT_EQ(kernel_pdf(KernelSpec(1), 0.5), 0.5);
  EXPECT_EQ(kernel_pdf(KernelSpec(2), 0.0), 0.75);
  EXPECT_EQ(kernel_pdf(KernelSpec(0), -0.5), 1.0);
  EXPECT_EQ(kernel_pdf(KernelSpec(0), 0.5), 0.0);
  EXPECT_EQ(kernel_pdf(KernelSpec(1), 1.2), 0.0);
  EXPECT_EQ(kernel_pdf(KernelSpec(2), -1.6), 0.0);
}

TEST(KernelPdf, NormalizedAndSymmetric) {
  for (int d : {0, 1, 2}) {
    const KernelSpec spec(d);
    const double reach = spec.half_width();
    // Integrate piece by piece; the pieces are unit intervals starting at -reach.
    double mass = 0.0;
    for (int j = 0; j <= d; ++j) {
      const double lo = -reach + j;
      // Stay inside the open piece; the box kernel is half-open.
      mass += testing::simpson([&](double u) { return kernel_pdf(spec, u); }, lo + 1e-14, lo + 1.0 - 1e-14, 200);
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
    for (int i = 1; i < 100; ++i) {
      const double u = reach * i / 100.0;
      if (d == 0 && std::abs(u - 0.5) < 1e-12) continue;
      EXPECT_DOUBLE_EQ(kernel_pdf(spec, u), kernel_pdf(spec, -u));
    }
  }
}

// w2 = w1 * w0, i.e. w2(u) = integral of w1 over [u - 1/2, u + 1/2].
TEST(KernelPdf, QuadraticIsConvolutionOfTentAndBox) {
  const KernelSpec tent(1);
  const KernelSpec quad(2);
  for (int i = -80; i <= 80; ++i) {
    const double u = i / 50.0;
    const double conv = testing::simpson([&](double t) { return kernel_pdf(tent, t); }, u - 0.5, u + 0.5, 4000);
    EXPECT_NEAR(kernel_pdf(quad, u), conv, 1e-6) << "u=" << u;
  }
}

TEST(SampleKernel, BoxStaysInRange) {
  Rng rng(1);
  const KernelSpec box(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = sample_kernel(box, rng);
    EXPECT_GE(u, -0.5);
    EXPECT_LT(u, 0.5);
  }
}

TEST(SampleKernel, TentMeanWithinThreeStandardErrors) {
  Rng rng(2);
  const KernelSpec tent(1);
  const int draws = 1000000;
  double total = 0.0;
  for (int i = 0; i < draws; ++i) total += sample_kernel(tent, rng);
  EXPECT_LT(std::abs(total / draws), 3.0 * std::sqrt(1.0 / 6.0) / std::sqrt(static_cast<double>(draws)));
}

TEST(SampleKernel, QuadraticMatchesDensity) {
  Rng rng(3);
  const KernelSpec quad(2);
  std::vector<double> draws(1000000);
  for (auto& u : draws) u = sample_kernel(quad, rng);
  const auto counts = testing::histogram(draws, -1.5, 1.5, 30);
  const auto probs = testing::bin_probabilities([&](double u) { return kernel_pdf(quad, u); }, -1.5, 1.5, 30);
  EXPECT_GT(testing::chi_square_pvalue(counts, probs), 0.001);
}

TEST(CompoundPdf, UniformIsPreserved) {
  EvalCounter counter;
  const auto pmf = build_ancestor(build_model({1.0}), 7, counter);
  for (int d : {0, 1, 2}) {
    for (int i = 0; i < 100; ++i) {
      EXPECT_NEAR(compound_pdf(pmf, KernelSpec(d), -1.0 + i * 0.02 + 0.001), 0.5, 1e-14);
    }
  }
}

TEST(CompoundPdf, TentInterpolatesCosineBump) {
  EvalCounter counter;
  const auto pmf = build_ancestor(build_model({1.0, 1.0}), 4, counter);
  // The knot at -1 carries the density floor rather than an exact zero.
  EXPECT_NEAR(compound_pdf(pmf, KernelSpec(1), -0.75), 0.25, 1e-12);
  // Wraps past x = 1 back to the knot at -1.
  EXPECT_NEAR(compound_pdf(pmf, KernelSpec(1), 0.75), 0.25, 1e-12);
}

TEST(CompoundPdf, TentMatchesModelAtKnots) {
  Rng rng(4);
  for (int degree : {1, 6, 30}) {
    const FbmModel model = random_model(degree, rng);
    for (int k : {2 * degree + 1, 4 * degree, 5 * degree + 3}) {
      EvalCounter counter;
      const auto pmf = build_ancestor(model, k, counter);
      for (int i = 0; i < k; ++i) {
        const double x = grid_point(i, k);
        EXPECT_NEAR(compound_pdf(pmf, KernelSpec(1), x), pdf_unclamped(model, x), 1e-12);
      }
    }
  }
}

TEST(CompoundPdf, TentIsPiecewiseLinear) {
  Rng rng(5);
  const FbmModel model = random_model(9, rng);
  const int k = 31;
  EvalCounter counter;
  const auto pmf = build_ancestor(model, k, counter);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform(-1.0, 1.0);
    const int left = static_cast<int>(std::floor((x + 1.0) * k / 2.0));
    const double x0 = grid_point(left, k);
    const double x1 = x0 + 2.0 / k;
    const double p0 = pdf_unclamped(model, x0);
    const double p1 = pdf_unclamped(model, wrap(x1));
    const double linear = (p0 * (x1 - x) + p1 * (x - x0)) / (x1 - x0);
    EXPECT_NEAR(compound_pdf(pmf, KernelSpec(1), x), linear, 1e-12);
  }
}

TEST(CompoundPdf, Normalized) {
  Rng rng(6);
  for (int degree : {1, 8, 25}) {
    const FbmModel model = random_model(degree, rng);
    for (int k : {2 * degree + 1, 4 * degree}) {
      if (k < 2 * degree + 1) continue;
      EvalCounter counter;
      const auto pmf = build_ancestor(model, k, counter);
      for (int d : {0, 1, 2}) {
        const KernelSpec spec(d);
        // Midpoint rule aligned to the knots is exact per piece up to the
        // polynomial degree; use a fine grid to stay well inside 1e-6.
        const int points = 200 * k;
        double total = 0.0;
        for (int i = 0; i < points; ++i) total += compound_pdf(pmf, spec, -1.0 + (i + 0.5) * 2.0 / points);
        EXPECT_NEAR(total * 2.0 / points, 1.0, 1e-6) << "N=" << degree << " K=" << k << " D=" << d;
      }
    }
  }
}

TEST(DaasSample, UniformModelIsUniform) {
  Rng rng(7);
  EvalCounter counter;
  const auto batch = daas_sample(build_model({1.0}), 5, KernelSpec(1), 10000, rng, counter);
  const double d = testing::ks_statistic(batch.samples, [](double x) { return (x + 1.0) / 2.0; });
  EXPECT_LT(d, testing::ks_critical_001(batch.size()));
}

TEST(DaasSample, BillsExactlyKEvaluations) {
  Rng rng(8);
  const FbmModel model = random_model(10, rng);
  EvalCounter counter;
  const auto batch = daas_sample(model, 50, KernelSpec(1), 1000000, rng, counter);
  EXPECT_EQ(counter.pdf_evals, 50u);
  EXPECT_EQ(counter.score_evals, 0u);
  EXPECT_EQ(batch.evals.model_evals(), 50u);
  EXPECT_EQ(batch.size(), 1000000u);
}

TEST(DaasSample, RejectsInvalidParameters) {
  Rng rng(9);
  EvalCounter counter;
  const FbmModel model = random_model(10, rng);
  EXPECT_THROW(daas_sample(model, 20, KernelSpec(1), 10, rng, counter), ParameterError);
  EXPECT_THROW(daas_sample(model, 21, KernelSpec(1), 0, rng, counter), ParameterError);
}

TEST(DaasSample, WrapsEdgeAncestors) {
  const int k = 9;
  for (int n : {0, k - 1}) {
    for (double u : {-1.5, -1.0, -0.5, -1e-17, 0.0, 0.4999999999999999, 1.0, 1.4999999999999998}) {
      const double x = wrap(-1.0 + 2.0 / k * (n + u));
      EXPECT_GE(x, -1.0);
      EXPECT_LT(x, 1.0);
    }
  }
  // Mass only at the first and last cells, widest kernel.
  std::vector<double> probs(k, 0.0);
  probs.front() = 0.5;
  probs.back() = 0.5;
  const AliasTable table{AncestorPmf(probs)};
  Rng rng(10);
  for (int i = 0; i < 100000; ++i) {
    const double x = daas_draw(table, KernelSpec(2), rng);
    EXPECT_GE(x, -1.0);
    EXPECT_LT(x, 1.0);
  }
}

// Histogram of DAAS draws against the compound density they are drawn from.
void expect_matches_compound(const FbmModel& model, int k, int d, int count, std::uint64_t seed) {
  Rng rng(seed);
  EvalCounter counter;
  const KernelSpec spec(d);
  const auto batch = daas_sample(model, k, spec, count, rng, counter);
  const auto pmf = build_ancestor(model, k, counter);
  constexpr int bins = 50;
  const auto counts = testing::histogram(batch.samples, -1.0, 1.0, bins);
  const auto probs =
      testing::bin_probabilities([&](double x) { return compound_pdf(pmf, spec, x); }, -1.0, 1.0, bins, 1000);
  EXPECT_GT(testing::chi_square_pvalue(counts, probs), 0.001) << "N=" << model.degree() << " K=" << k << " D=" << d;
}

TEST(DaasSample, MatchesCompoundDensity) {
  Rng rng(11);
  expect_matches_compound(random_model(10, rng), 50, 1, 100000, 12);
}

TEST(DaasSample, MatchesCompoundDensityAcrossMatrix) {
  Rng rng(13);
  std::uint64_t seed = 100;
  for (int degree : {0, 3, 10}) {
    const FbmModel model = random_model(degree, rng);
    for (int k : {2 * degree + 1, 4 * degree + 2}) {
      for (int d : {0, 1, 2}) expect_matches_compound(model, k, d, 50000, seed++);
    }
  }
}

}  // namespace
}  // namespace daas
