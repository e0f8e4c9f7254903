#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spotfit/batch_engine.hpp"

namespace spotfit {

struct BenchPlan {
  std::vector<int> sizes = default_sizes();
  std::vector<std::size_t> batch_sizes = {10, 100, 1000, 10000};
  std::vector<int> repeats = {200, 20, 10, 1};  // per batch size
  Engine engine = Engine::Implicit3;
  double n_signal = 400;
  double n_background = 40;
  unsigned workers = 0;
  std::uint64_t seed = 1;

  static std::vector<int> default_sizes();
  void validate() const;
};

struct BenchEntry {
  int size = 0;
  std::size_t batch = 0;
  int repeats = 0;
  double mean_seconds = 0;  // wall time per call
  double fits_per_second = 0;
  double pixels_per_second = 0;
  bool under_resolved = false;  // mean below five clock ticks
};

struct BenchReport {
  std::vector<BenchEntry> entries;
  std::string machine;
  std::string engine;
};

// Hardware and build description stamped on every report.
std::string machine_descriptor();

using BenchProgress = std::function<void(const BenchEntry&)>;

BenchReport run_bench(const BenchPlan& plan, const BenchProgress& progress = {});

}  // namespace spotfit
