#include "spotfit/bench.hpp"

#include <chrono>
#include <fstream>
#include <numeric>
#include <thread>

#include "spotfit/simulator.hpp"

namespace spotfit {

std::vector<int> BenchPlan::default_sizes() {
  std::vector<int> sizes(29);
  std::iota(sizes.begin(), sizes.end(), 4);
  return sizes;
}

void BenchPlan::validate() const {
  if (sizes.empty() || batch_sizes.empty()) throw InvalidInput("bench: empty plan");
  if (repeats.size() != batch_sizes.size()) {
    throw InvalidInput("bench: need one repeat count per batch size");
  }
  for (int s : sizes) {
    if (s < 4 || static_cast<std::size_t>(s) * static_cast<std::size_t>(s) > kMaxPixels) {
      throw InvalidInput("bench: image size " + std::to_string(s) + " outside [4, 32]");
    }
  }
  for (std::size_t b : batch_sizes) {
    if (b == 0) throw InvalidInput("bench: batch sizes must be >= 1");
  }
  for (int r : repeats) {
    if (r < 1) throw InvalidInput("bench: repeats must be >= 1");
  }
}

std::string machine_descriptor() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  for (std::string line; std::getline(info, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(line.find_first_not_of(' ', colon + 1));
      break;
    }
  }
  std::string compiler =
#if defined(__clang__)
      "clang " __clang_version__;
#elif defined(__GNUC__)
      "gcc " __VERSION__;
#else
      "unknown compiler";
#endif
  return cpu + "; " + std::to_string(std::thread::hardware_concurrency()) + " hardware threads; " +
         compiler;
}

BenchReport run_bench(const BenchPlan& plan, const BenchProgress& progress) {
  plan.validate();
  using Clock = std::chrono::steady_clock;
  const double tick = static_cast<double>(Clock::period::num) / Clock::period::den;
  const std::size_t largest = *std::max_element(plan.batch_sizes.begin(), plan.batch_sizes.end());

  BenchReport report;
  report.machine = machine_descriptor();
  report.engine = std::string(to_string(plan.engine));

  for (int size : plan.sizes) {
    SimConfig sim;
    sim.size = size;
    sim.count = largest;
    sim.n_signal = plan.n_signal;
    sim.n_background = plan.n_background;
    sim.seed = plan.seed;
    const SimulatedBatch data = simulate_batch(sim, plan.workers);
    FitConfig config;
    const std::vector<InitialEstimate> inits =
        estimate_batch(data.images, config.bounds_for(sim.grid()), plan.workers);

    for (std::size_t k = 0; k < plan.batch_sizes.size(); ++k) {
      const std::size_t batch = plan.batch_sizes[k];
      const ImageBatch images = data.images.prefix(batch);
      BatchRequest request;
      request.images = &images;
      request.inits = std::span<const InitialEstimate>(inits).first(batch);
      request.config = config;
      request.engine = plan.engine;
      request.workers = plan.workers;

      fit_batch(request);  // warm-up
      double total = 0;
      for (int r = 0; r < plan.repeats[k]; ++r) {
        const auto start = Clock::now();
        const BatchResult result = fit_batch(request);
        total += std::chrono::duration<double>(Clock::now() - start).count();
      }

      BenchEntry e;
      e.size = size;
      e.batch = batch;
      e.repeats = plan.repeats[k];
      e.mean_seconds = total / plan.repeats[k];
      e.fits_per_second = static_cast<double>(batch) / e.mean_seconds;
      e.pixels_per_second = e.fits_per_second * size * size;
      e.under_resolved = e.mean_seconds < 5 * tick;
      report.entries.push_back(e);
      if (progress) progress(e);
    }
  }
  return report;
}

}  // namespace spotfit
