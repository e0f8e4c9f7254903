#pragma once

#include <array>
#include <span>

#include "spotfit/gaussian_model.hpp"

namespace spotfit::detail {

// Per-fit scratch buffers sized for the largest supported image.
struct Workspace {
  std::array<float, kMaxPixels> f_storage;
  std::array<Partials<float>, kMaxPixels> df_storage;
  std::array<Partials<float>, kMaxPixels> d_storage;

  std::span<float> f{f_storage};
  std::span<Partials<float>> df{df_storage};
  std::span<Partials<float>> d{d_storage};

  Workspace() = default;
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
};

}  // namespace spotfit::detail
