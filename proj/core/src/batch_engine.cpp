#include "spotfit/batch_engine.hpp"

#include <chrono>

#include "spotfit/parallel.hpp"

namespace spotfit {

std::string_view to_string(Engine engine) noexcept {
  return engine == Engine::Explicit5 ? "explicit5" : "implicit3";
}

std::optional<Engine> parse_engine(std::string_view name) noexcept {
  if (name == "implicit3") return Engine::Implicit3;
  if (name == "explicit5") return Engine::Explicit5;
  return std::nullopt;
}

std::vector<InitialEstimate> estimate_batch(const ImageBatch& images, const ParameterBounds& bounds,
                                            unsigned workers) {
  std::vector<InitialEstimate> out(images.size());
  parallel_for_chunks(images.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = estimate_initial(images[i], bounds);
      } catch (const InvalidInput&) {
        out[i] = InitialEstimate{{0.0f, 0.0f, bounds.sigma_min}, {}};
      }
    }
  });
  return out;
}

BatchResult fit_batch(const BatchRequest& request) {
  if (request.images == nullptr) throw InvalidInput("batch request without images");
  const ImageBatch& images = *request.images;
  request.config.validate();

  std::vector<InitialEstimate> estimated;
  std::span<const InitialEstimate> inits = request.inits;
  if (inits.empty() && !images.empty()) {
    estimated = estimate_batch(images, request.config.bounds_for(images.grid()), request.workers);
    inits = estimated;
  }
  if (inits.size() != images.size()) {
    throw InvalidInput("batch request has " + std::to_string(inits.size()) +
                       " initial estimates for " + std::to_string(images.size()) + " images");
  }

  const auto start = std::chrono::steady_clock::now();
  BatchResult out;
  out.results.resize(images.size());
  parallel_for_chunks(images.size(), request.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out.results[i] = request.engine == Engine::Explicit5
                             ? fit_explicit5(images[i], inits[i].shape, inits[i].amps, request.config)
                             : fit_single(images[i], inits[i].shape, request.config);
      } catch (const InvalidInput&) {
        FitResult bad;
        bad.shape = inits[i].shape;
        bad.stop = StopReason::NotConverged;
        bad.invalid_input = true;
        out.results[i] = bad;
      }
    }
  });
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace spotfit
