#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "spotfit/lm_solver.hpp"
#include "spotfit/simulator.hpp"

namespace spotfit {

class MismatchedLengths : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SummaryStats {
  double median = 0;
  double mean = 0;
  double std = 0;  // sample standard deviation
  std::size_t count = 0;
};

// Absolute errors of one fit in units of the true sigma.
struct FitError {
  std::size_t index = 0;
  double x = 0;
  double y = 0;
  double sigma = 0;  // ||sigma_hat| - sigma_true|
};

struct AccuracyStats {
  SummaryStats position;  // x and y errors pooled
  SummaryStats sigma;
  std::size_t used = 0;
  std::size_t excluded = 0;  // NotConverged fits
};

struct IterationHistogram {
  std::vector<std::size_t> bins;  // bins[k] = fits that used k iterations
  std::array<std::size_t, 5> stops{};  // indexed like kStopReasons
  std::size_t no_improvement = 0;  // fits whose last iteration did not lower chi^2
  std::size_t total = 0;

  std::size_t stop_count(StopReason reason) const noexcept;
  double stop_fraction(StopReason reason) const noexcept;
  double no_improvement_fraction() const noexcept;
  double mean() const noexcept;
  // Smallest iteration count with the highest tally.
  std::size_t mode() const noexcept;
};

SummaryStats summarize(std::vector<double> samples);

// Per-fit errors for converged fits, in result order.
std::vector<FitError> fit_errors(std::span<const FitResult> results,
                                 std::span<const TruthRecord> truths);

AccuracyStats accuracy(std::span<const FitResult> results, std::span<const TruthRecord> truths);

// Mean position error relative to the shot-noise limit 1/sqrt(n_signal).
double expected_error_ratio(const AccuracyStats& stats, double n_signal);

IterationHistogram iteration_stats(std::span<const FitResult> results, int max_iterations = 20);

}  // namespace spotfit
