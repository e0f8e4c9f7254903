#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "spotfit/image.hpp"

namespace spotfit {

struct SimConfig {
  int size = 9;  // square images of size x size pixels
  std::size_t count = 0;
  double n_signal = 400;      // integrated counts of the Gaussian
  double n_background = 40;   // total background counts over the image
  double sigma_min = 1.0;
  double sigma_max = 2.0;
  std::optional<double> center_spread;  // std of the center offset; size/20 when empty
  bool noise = true;
  bool quantize = true;  // round to non-negative integers
  std::uint64_t seed = 0;

  double spread() const noexcept { return center_spread.value_or(size / 20.0); }
  PixelGrid grid() const noexcept { return {size, size}; }
  void validate() const;
};

struct TruthRecord {
  std::size_t index = 0;
  float x = 0;
  float y = 0;
  float sigma = 0;
  float alpha = 0;  // peak amplitude n_signal / (2 pi sigma^2)
  float beta = 0;   // background per pixel n_background / size^2

  friend bool operator==(const TruthRecord&, const TruthRecord&) = default;
};

struct SimulatedSpot {
  SpotImage image;
  TruthRecord truth;
};

struct SimulatedBatch {
  ImageBatch images;
  std::vector<TruthRecord> truths;
};

// Deterministic in (cfg.seed, index) alone.
SimulatedSpot simulate_spot(const SimConfig& cfg, std::size_t index);

// Images 0..count-1 in index order, independent of the worker count.
SimulatedBatch simulate_batch(const SimConfig& cfg, unsigned workers = 0);

}  // namespace spotfit
