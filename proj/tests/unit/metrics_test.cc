#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "nagntk/data.h"
#include "nagntk/errors.h"
#include "nagntk/metrics.h"
#include "nagntk/network.h"
#include "nagntk/ntk.h"
#include "nagntk/optimizers.h"

namespace nagntk {
namespace {

TEST(MaxDistance, ZeroAtInitAndUnitShift) {
  NetworkState s = NetworkState::init(16, 4, 0);
  EXPECT_EQ(max_distance(s), 0.0);
  Matrix w = s.weights();
  w(7, 2) += 1.0;
  s.set_weights(w);
  EXPECT_DOUBLE_EQ(max_distance(s), 1.0);
}

TEST(PatternRatio, ZeroAtInitAndOneWhenNegated) {
  const Dataset ds = synthetic(20, 5, 3);
  NetworkState s = NetworkState::init(64, 5, 1);
  EXPECT_EQ(pattern_ratio(s, ds), 0.0);
  Matrix neg = s.initial_weights();
  neg *= -1.0;
  s.set_weights(neg);
  EXPECT_EQ(pattern_ratio(s, ds), 1.0);
}

TEST(PatternRatio, CountsFractionOfIndicators) {
  PatternMatrix a(2, 4), b(2, 4);
  a.set(0, 1);
  b.set(0, 1);
  b.set(1, 3);
  EXPECT_DOUBLE_EQ(pattern_ratio(b, a), 1.0 / 8.0);
}

TEST(FlipCounts, NoFlips) {
  PatternMatrix p(3, 40);
  p.set(1, 5);
  const std::vector<PatternMatrix> history{p, p, p};
  const FlipReport r = flip_counts(history, 0.0);
  EXPECT_EQ(r.sup, 0u);
  EXPECT_TRUE(r.all_pass());
}

TEST(FlipCounts, CumulativeAcrossSnapshots) {
  PatternMatrix p0(2, 8), p1(2, 8), p2(2, 8);
  p1.set(0, 1);  // flips on, then back off in p2
  p2.set(0, 2);
  p2.set(1, 0);
  const std::vector<PatternMatrix> history{p0, p1, p2};
  const FlipReport r = flip_counts(history, 1.0);
  EXPECT_EQ(r.counts, (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(r.sup, 2u);
  EXPECT_DOUBLE_EQ(r.bound, 32.0);
}

TEST(FlipCounts, WideRadiusBoundCoversEveryNeuron) {
  PatternMatrix p0(1, 10), p1(1, 10);
  for (std::size_t r = 0; r < 10; ++r) p1.set(0, r);
  const std::vector<PatternMatrix> history{p0, p1};
  const FlipReport r = flip_counts(history, 0.25);
  EXPECT_EQ(r.sup, 10u);
  EXPECT_TRUE(r.all_pass());
  FlipTracker t(p0);
  EXPECT_THROW(t.update(PatternMatrix(2, 10)), DimensionError);
}

TEST(FlipCounts, NagRunStaysWithinBound) {
  const Dataset ds = synthetic(50, 10, 0);
  const HyperParams hp = derive_hyperparams(spectrum_summary(analytic_ntk(ds)), Method::kNAG);
  NetworkState s = NetworkState::init(8192, 10, 0);
  OptimizerState os(hp, s);
  const ResidualTrace tr = train(s, os, ds, 200);
  const double radius = *std::max_element(tr.max_dist.begin(), tr.max_dist.end());
  EXPECT_LE(static_cast<double>(tr.sup_flips.back()), 4.0 * 8192 * radius);
  EXPECT_TRUE(std::is_sorted(tr.sup_flips.begin(), tr.sup_flips.end()));
}

TEST(GramDrift, Basics) {
  const SymMatrix h(Matrix{{0.5, 0.1}, {0.1, 0.5}});
  const GramDrift same = gram_drift(h, h, 0.0, 2);
  EXPECT_EQ(same.measured, 0.0);
  EXPECT_EQ(same.bound, 0.0);
  EXPECT_TRUE(same.ok);
  const GramDrift moved = gram_drift(SymMatrix(Matrix{{0.6, 0.1}, {0.1, 0.5}}), h, 0.01, 2);
  EXPECT_NEAR(moved.measured, 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(moved.bound, 0.04);
  EXPECT_FALSE(moved.ok);
}

TEST(GramDrift, ShrinksWithWidth) {
  const Dataset ds = synthetic(20, 8, 2);
  const HyperParams hp = derive_hyperparams(spectrum_summary(analytic_ntk(ds)), Method::kNAG);
  auto final_drift = [&](std::size_t m) {
    NetworkState s = NetworkState::init(m, 8, 0);
    const SymMatrix h0 = empirical_gram(s, ds.features());
    OptimizerState os(hp, s);
    train(s, os, ds, 100);
    return fro_norm(empirical_gram(s, ds.features()).matrix() - h0.matrix());
  };
  EXPECT_GT(final_drift(512), final_drift(8192));
}

TEST(InitResidual, ExactFitAndPositiveReference) {
  const InitResidualReport zero = init_residual_check(Vector(5, 0.0), 5, 100);
  EXPECT_EQ(zero.norm_sq, 0.0);
  EXPECT_GT(zero.reference, 0.0);
  EXPECT_GT(init_residual_check(Vector{1.0, 1.0}, 2, 2, 0.5).reference, 0.0);
}

TEST(InitResidual, GrowsLinearlyInSampleCount) {
  auto median_norm_sq = [](std::size_t n) {
    std::vector<double> v;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Dataset ds = synthetic(n, 10, 1000 + seed);
      const NetworkState s = NetworkState::init(1024, 10, seed);
      v.push_back(init_residual_check(residual(s, ds), n, 1024).norm_sq);
    }
    std::sort(v.begin(), v.end());
    return 0.5 * (v[9] + v[10]);
  };
  const double ratio = median_norm_sq(100) / median_norm_sq(50);
  EXPECT_GE(ratio, 1.5);
  EXPECT_LE(ratio, 2.7);
}

TEST(ItersToThreshold, Basics) {
  EXPECT_EQ(iters_to_threshold(Vector{0.0, 0.0}, 0.1), 0u);
  Vector geo;
  for (int t = 0; t < 50; ++t) geo.push_back(7.0 * std::pow(0.5, t));
  EXPECT_EQ(iters_to_threshold(geo, std::pow(0.5, 12)), 12u);
  EXPECT_EQ(iters_to_threshold(Vector{1.0, 0.9}, 0.1), std::nullopt);
  EXPECT_THROW(iters_to_threshold(geo, 1.5), Error);
  EXPECT_THROW(iters_to_threshold(geo, 0.0), Error);
}

TEST(ItersToThreshold, NagBeatsGd) {
  const Dataset ds = synthetic(50, 10, 1);
  const SpectrumSummary ss = spectrum_summary(analytic_ntk(ds));
  auto iters = [&](Method m) {
    NetworkState s = NetworkState::init(2048, 10, 0);
    OptimizerState os(derive_hyperparams(ss, m), s);
    return iters_to_threshold(train(s, os, ds, 400), 1e-3);
  };
  const auto nag = iters(Method::kNAG);
  const auto gd = iters(Method::kGD);
  ASSERT_TRUE(nag.has_value());
  EXPECT_TRUE(!gd.has_value() || *nag < *gd);
}

}  // namespace
}  // namespace nagntk
