#include "spotfit/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "spotfit/parallel.hpp"

namespace spotfit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, index).
std::mt19937_64 stream_for(std::uint64_t seed, std::size_t index) {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ splitmix64(0x5350423100000000ULL + index));
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return std::mt19937_64(seq);
}

void render(const SimConfig& cfg, const TruthRecord& truth, std::mt19937_64& rng,
            std::span<float> out) {
  const int s = cfg.size;
  const double inv_2s2 = 1.0 / (2.0 * double(truth.sigma) * double(truth.sigma));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::size_t i = 0;
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x, ++i) {
      const double dx = x - double(truth.x);
      const double dy = y - double(truth.y);
      double v = double(truth.alpha) * std::exp(-(dx * dx + dy * dy) * inv_2s2) + double(truth.beta);
      if (cfg.noise) {
        const double z = unit(rng);
        if (v > 0) v += std::sqrt(v) * z;
      }
      if (cfg.quantize) v = std::round(v);
      if (cfg.noise || cfg.quantize) v = std::max(v, 0.0);
      out[i] = static_cast<float>(v);
    }
  }
}

TruthRecord draw_truth(const SimConfig& cfg, std::size_t index, std::mt19937_64& rng) {
  std::normal_distribution<double> offset(0.0, cfg.spread());
  std::uniform_real_distribution<double> width(cfg.sigma_min, cfg.sigma_max);
  const double center = (cfg.size - 1) / 2.0;
  TruthRecord t;
  t.index = index;
  t.x = static_cast<float>(center + offset(rng));
  t.y = static_cast<float>(center + offset(rng));
  t.sigma = static_cast<float>(cfg.sigma_min == cfg.sigma_max ? cfg.sigma_min : width(rng));
  t.alpha = static_cast<float>(cfg.n_signal / (2.0 * std::numbers::pi * double(t.sigma) * double(t.sigma)));
  t.beta = static_cast<float>(cfg.n_background / (double(cfg.size) * cfg.size));
  return t;
}

}  // namespace

void SimConfig::validate() const {
  if (size < 4) throw InvalidInput("simulation: size must be >= 4");
  require_valid(grid());
  if (!(n_signal >= 0) || !(n_background >= 0)) {
    throw InvalidInput("simulation: signal and background counts must be >= 0");
  }
  if (!(sigma_min > 0) || !(sigma_max >= sigma_min) || !std::isfinite(sigma_max)) {
    throw InvalidInput("simulation: sigma range must satisfy 0 < min <= max");
  }
  if (!(spread() >= 0) || !std::isfinite(spread())) {
    throw InvalidInput("simulation: center spread must be finite and >= 0");
  }
}

SimulatedSpot simulate_spot(const SimConfig& cfg, std::size_t index) {
  cfg.validate();
  auto rng = stream_for(cfg.seed, index);
  SimulatedSpot spot;
  spot.truth = draw_truth(cfg, index, rng);
  spot.image = SpotImage(cfg.grid(), std::vector<float>(cfg.grid().size()));
  render(cfg, spot.truth, rng, spot.image.values);
  return spot;
}

SimulatedBatch simulate_batch(const SimConfig& cfg, unsigned workers) {
  cfg.validate();
  SimulatedBatch batch{ImageBatch(cfg.grid(), cfg.count), std::vector<TruthRecord>(cfg.count)};
  parallel_for_chunks(cfg.count, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = stream_for(cfg.seed, i);
      batch.truths[i] = draw_truth(cfg, i, rng);
      render(cfg, batch.truths[i], rng, batch.images.mutable_image(i));
    }
  });
  return batch;
}

}  // namespace spotfit
