#include "spotfit/assess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spotfit {

namespace {

std::size_t stop_slot(StopReason reason) noexcept {
  return static_cast<std::size_t>(std::find(kStopReasons.begin(), kStopReasons.end(), reason) -
                                  kStopReasons.begin());
}

}  // namespace

SummaryStats summarize(std::vector<double> samples) {
  SummaryStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(s.count);
  double ss = 0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.std = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1)) : 0.0;

  const std::size_t mid = s.count / 2;
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(mid), samples.end());
  s.median = samples[mid];
  if (s.count % 2 == 0) {
    const double lower = *std::max_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(mid));
    s.median = 0.5 * (s.median + lower);
  }
  return s;
}

std::vector<FitError> fit_errors(std::span<const FitResult> results,
                                 std::span<const TruthRecord> truths) {
  if (results.size() != truths.size()) {
    throw MismatchedLengths("assess: " + std::to_string(results.size()) + " fits but " +
                            std::to_string(truths.size()) + " truth records");
  }
  std::vector<FitError> errors;
  errors.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    const FitResult& r = results[i];
    if (r.stop == StopReason::NotConverged) continue;
    const TruthRecord& t = truths[i];
    const double scale = 1.0 / static_cast<double>(t.sigma);
    errors.push_back({t.index, std::abs(double(r.shape.x_bar) - double(t.x)) * scale,
                      std::abs(double(r.shape.y_bar) - double(t.y)) * scale,
                      std::abs(std::abs(double(r.shape.sigma)) - double(t.sigma)) * scale});
  }
  return errors;
}

AccuracyStats accuracy(std::span<const FitResult> results, std::span<const TruthRecord> truths) {
  const auto errors = fit_errors(results, truths);
  std::vector<double> position;
  std::vector<double> sigma;
  position.reserve(2 * errors.size());
  sigma.reserve(errors.size());
  for (const FitError& e : errors) {
    position.push_back(e.x);
    position.push_back(e.y);
    sigma.push_back(e.sigma);
  }
  AccuracyStats stats;
  stats.position = summarize(std::move(position));
  stats.sigma = summarize(std::move(sigma));
  stats.used = errors.size();
  stats.excluded = results.size() - errors.size();
  return stats;
}

double expected_error_ratio(const AccuracyStats& stats, double n_signal) {
  if (!(n_signal > 0)) throw std::invalid_argument("expected_error_ratio: n_signal must be > 0");
  return stats.position.mean * std::sqrt(n_signal);
}

std::size_t IterationHistogram::stop_count(StopReason reason) const noexcept {
  return stops[stop_slot(reason)];
}

double IterationHistogram::stop_fraction(StopReason reason) const noexcept {
  return total ? static_cast<double>(stop_count(reason)) / static_cast<double>(total) : 0.0;
}

double IterationHistogram::no_improvement_fraction() const noexcept {
  return total ? static_cast<double>(no_improvement) / static_cast<double>(total) : 0.0;
}

double IterationHistogram::mean() const noexcept {
  if (total == 0) return 0.0;
  double acc = 0;
  for (std::size_t k = 0; k < bins.size(); ++k) acc += static_cast<double>(k * bins[k]);
  return acc / static_cast<double>(total);
}

std::size_t IterationHistogram::mode() const noexcept {
  return static_cast<std::size_t>(std::max_element(bins.begin(), bins.end()) - bins.begin());
}

IterationHistogram iteration_stats(std::span<const FitResult> results, int max_iterations) {
  IterationHistogram h;
  int top = std::max(max_iterations, 0);
  for (const FitResult& r : results) top = std::max(top, r.iterations_used);
  h.bins.assign(static_cast<std::size_t>(top) + 1, 0);
  for (const FitResult& r : results) {
    ++h.bins[static_cast<std::size_t>(std::max(r.iterations_used, 0))];
    ++h.stops[stop_slot(r.stop)];
    if (!r.improved) ++h.no_improvement;
    ++h.total;
  }
  return h;
}

}  // namespace spotfit
