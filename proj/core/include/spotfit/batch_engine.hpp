#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spotfit/image.hpp"
#include "spotfit/initializer.hpp"
#include "spotfit/lm_solver.hpp"

namespace spotfit {

enum class Engine { Implicit3, Explicit5 };

std::string_view to_string(Engine engine) noexcept;
std::optional<Engine> parse_engine(std::string_view name) noexcept;

struct BatchRequest {
  const ImageBatch* images = nullptr;
  // One estimate per image; estimated from the images when empty.
  std::span<const InitialEstimate> inits;
  FitConfig config;
  Engine engine = Engine::Implicit3;
  unsigned workers = 0;  // 0 = hardware concurrency
};

struct BatchResult {
  std::vector<FitResult> results;
  double seconds = 0;  // marshaling, fitting and collection; excludes estimation
};

// Initial estimates for every image, computed in parallel.
std::vector<InitialEstimate> estimate_batch(const ImageBatch& images, const ParameterBounds& bounds,
                                            unsigned workers = 0);

// results[i] is the fit of images[i] regardless of the worker count. A
// malformed image yields a NotConverged result with invalid_input set.
BatchResult fit_batch(const BatchRequest& request);

}  // namespace spotfit
