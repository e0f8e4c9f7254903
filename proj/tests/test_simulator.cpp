#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "spotfit/simulator.hpp"

namespace spotfit {
namespace {

TEST(Simulator, NoiselessTotalMatchesCounts) {
  SimConfig cfg;
  cfg.count = 1;
  cfg.noise = false;
  cfg.sigma_min = cfg.sigma_max = 1.5;
  cfg.center_spread = 0.0;
  const auto spot = simulate_spot(cfg, 0);
  const double total = std::accumulate(spot.image.values.begin(), spot.image.values.end(), 0.0);
  EXPECT_NEAR(total, 440.0, 0.05 * 440.0);
  EXPECT_FLOAT_EQ(spot.truth.x, 4.0f);
  EXPECT_FLOAT_EQ(spot.truth.sigma, 1.5f);
}

TEST(Simulator, TruthAmplitudes) {
  SimConfig cfg;
  cfg.count = 1;
  cfg.seed = 9;
  const auto t = simulate_spot(cfg, 0).truth;
  EXPECT_NEAR(t.alpha, 400 / (2 * std::numbers::pi * t.sigma * t.sigma), 1e-4);
  EXPECT_FLOAT_EQ(t.beta, 40.0f / 81.0f);
}

TEST(Simulator, BackgroundOnlyWithoutNoise) {
  SimConfig cfg;
  cfg.count = 3;
  cfg.n_signal = 0;
  cfg.n_background = 400;
  cfg.noise = false;
  const auto batch = simulate_batch(cfg);
  const float want = std::round(400.0f / 81.0f);
  for (float v : batch.images.pixels()) EXPECT_EQ(v, want);
}

TEST(Simulator, NoiselessMinimumAtLeastRoundedBackground) {
  SimConfig cfg;
  cfg.count = 100;
  cfg.n_background = 200;
  cfg.noise = false;
  const auto batch = simulate_batch(cfg);
  const float floor_value = std::round(200.0f / 81.0f);
  for (float v : batch.images.pixels()) EXPECT_GE(v, floor_value);
}

TEST(Simulator, PixelsAreNonNegativeIntegers) {
  SimConfig cfg;
  cfg.count = 2000;
  cfg.n_background = 0;  // forces many negative draws before clamping
  cfg.seed = 4;
  const auto batch = simulate_batch(cfg);
  for (float v : batch.images.pixels()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_EQ(v, std::round(v));
  }
}

TEST(Simulator, CenterAndWidthStatistics) {
  SimConfig cfg;
  cfg.count = 100000;
  cfg.seed = 123;
  const auto batch = simulate_batch(cfg);
  double sx = 0, sxx = 0;
  float lo = 10, hi = 0;
  for (const auto& t : batch.truths) {
    const double d = t.x - 4.0;
    sx += d;
    sxx += d * d;
    lo = std::min(lo, t.sigma);
    hi = std::max(hi, t.sigma);
  }
  const double n = static_cast<double>(batch.truths.size());
  const double sd = std::sqrt((sxx - sx * sx / n) / (n - 1));
  EXPECT_NEAR(sd, 9.0 / 20.0, 0.03 * 9.0 / 20.0);
  EXPECT_GE(lo, 1.0f);
  EXPECT_LE(hi, 2.0f);
  EXPECT_LT(lo, 1.01f);
  EXPECT_GT(hi, 1.99f);
}

TEST(Simulator, NoiseVarianceFollowsIntensity) {
  SimConfig cfg;
  cfg.count = 20000;
  cfg.n_signal = 0;
  cfg.n_background = 81 * 50.0;  // 50 counts per pixel
  cfg.seed = 8;
  const auto batch = simulate_batch(cfg);
  double s = 0, ss = 0;
  for (float v : batch.images.pixels()) {
    s += v;
    ss += double(v) * v;
  }
  const double n = static_cast<double>(batch.images.pixels().size());
  const double mean = s / n;
  const double var = ss / n - mean * mean;
  EXPECT_NEAR(mean, 50.0, 0.05);
  EXPECT_NEAR(var, 50.0 + 1.0 / 12.0, 1.0);  // rounding adds about 1/12
}

TEST(Simulator, BatchMatchesSingleSpots) {
  SimConfig cfg;
  cfg.count = 50;
  cfg.seed = 77;
  const auto batch = simulate_batch(cfg, 4);
  for (std::size_t i : {std::size_t{0}, std::size_t{17}, std::size_t{49}}) {
    const auto spot = simulate_spot(cfg, i);
    EXPECT_EQ(spot.truth, batch.truths[i]);
    const auto view = batch.images[i];
    EXPECT_TRUE(std::equal(view.values.begin(), view.values.end(), spot.image.values.begin()));
  }
}

TEST(Simulator, IndependentOfWorkerCount) {
  SimConfig cfg;
  cfg.count = 1000;
  cfg.seed = 5;
  const auto a = simulate_batch(cfg, 1);
  const auto b = simulate_batch(cfg, 7);
  EXPECT_EQ(a.truths, b.truths);
  EXPECT_TRUE(std::ranges::equal(a.images.pixels(), b.images.pixels()));
}

TEST(Simulator, SeedsDiffer) {
  SimConfig cfg;
  cfg.count = 1000;
  cfg.seed = 1;
  const auto a = simulate_batch(cfg);
  cfg.seed = 2;
  const auto b = simulate_batch(cfg);
  EXPECT_FALSE(std::ranges::equal(a.images.pixels(), b.images.pixels()));
}

TEST(Simulator, EmptyBatch) {
  SimConfig cfg;
  cfg.count = 0;
  const auto batch = simulate_batch(cfg);
  EXPECT_TRUE(batch.images.empty());
  EXPECT_TRUE(batch.truths.empty());
}

TEST(Simulator, RejectsInvalidConfig) {
  SimConfig cfg;
  cfg.size = 3;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg.size = 33;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.n_signal = -1;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.sigma_min = 2;
  cfg.sigma_max = 1;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

}  // namespace
}  // namespace spotfit
