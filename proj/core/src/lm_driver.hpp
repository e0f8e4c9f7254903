#pragma once

// Levenberg-Marquardt control flow shared by the implicit three-parameter
// fit and the explicit five-parameter baseline.
//
// A Problem provides:
//   static constexpr std::size_t K;
//   using Params = std::array<float, K>;
//   Params limit(const Params&) const;
//   std::optional<double> evaluate(const Params&, BasicNormalSystem<K>&);
//   std::optional<double> chi2(const Params&);
//   ShapeParams shape_of(const Params&) const;
//   void finish(const Params&, FitResult&);

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "spotfit/lm_solver.hpp"

namespace spotfit::detail {

template <std::size_t K>
struct Step {
  std::array<double, K> delta{};
  bool failed = false;
};

template <std::size_t K>
Step<K> compute_step(const BasicNormalSystem<K>& sys, double lambda) {
  Step<K> step;
  for (std::size_t j = 0; j < K; ++j) {
    // A parameter with no leverage on the model gets no update.
    if (!(sys.jtj[j][j] > 0.0)) return step;
  }
  if (auto delta = solve_step(sys, lambda)) {
    step.delta = *delta;
    for (double d : step.delta) {
      if (!std::isfinite(d)) step.failed = true;
    }
  } else {
    step.failed = true;
  }
  return step;
}

template <std::size_t K>
bool all_small(const Step<K>& step, const std::array<float, K>& params, const FitConfig& config) {
  if (step.failed) return false;
  for (std::size_t j = 0; j < K; ++j) {
    const double scale = config.step_test == StepTest::Relative
                             ? std::max(1.0, std::abs(static_cast<double>(params[j])))
                             : 1.0;
    if (!(std::abs(step.delta[j]) < config.min_step * scale)) return false;
  }
  return true;
}

template <class Problem>
FitResult run_levenberg_marquardt(Problem& problem, const typename Problem::Params& init,
                                  const FitConfig& config, FitTrace* trace) {
  constexpr std::size_t K = Problem::K;
  using Params = typename Problem::Params;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  auto advance = [&](const Params& from, const Step<K>& step) {
    Params next = from;
    if (!step.failed) {
      for (std::size_t j = 0; j < K; ++j) {
        next[j] = static_cast<float>(static_cast<double>(from[j]) + step.delta[j]);
      }
    }
    return problem.limit(next);
  };
  auto trial_chi2 = [&](const Params& trial, const Step<K>& step) {
    if (step.failed) return kInf;
    return problem.chi2(trial).value_or(kInf);
  };
  auto record = [&](double lambda, double before, double after, const Params& trial) {
    if (trace) trace->trials.push_back({lambda, before, after, problem.shape_of(trial), false});
  };

  Params current = problem.limit(init);
  double lambda = config.lambda_init;
  StopReason stop = StopReason::MaxIterations;
  bool improved = true;
  int used = 0;

  for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
    ++used;
    BasicNormalSystem<K> sys;
    const double chi = problem.evaluate(current, sys).value_or(std::nan(""));
    if (trace && iteration == 0) trace->initial_chi2 = chi;
    if (!std::isfinite(chi)) {
      stop = StopReason::NotConverged;
      break;
    }
    if (chi < config.max_error) {
      stop = StopReason::MaxError;
      break;
    }

    const Params best = current;
    Step<K> step = compute_step(sys, lambda);
    Params trial = advance(best, step);
    double chi_trial = trial_chi2(trial, step);
    record(lambda, chi, chi_trial, trial);
    if (chi > chi_trial) lambda /= config.lambda_down;

    while (!all_small(step, best, config) && chi < chi_trial &&
           lambda < config.lambda_max) {
      lambda *= config.lambda_up;
      step = compute_step(sys, lambda);
      trial = advance(best, step);
      chi_trial = trial_chi2(trial, step);
      record(lambda, chi, chi_trial, trial);
    }

    if (std::isnan(chi_trial)) {
      current = best;
      stop = StopReason::NotConverged;
      break;
    }
    if (chi < chi_trial) {
      current = best;
      if (all_small(step, best, config)) {
        // The step vanished before the error decreased.
        improved = false;
        stop = StopReason::MinDelta;
      } else {
        stop = StopReason::NotConverged;
      }
      break;
    }

    current = trial;
    if (trace) {
      trace->trials.back().accepted = true;
      trace->accepted_chi2.push_back(chi_trial);
    }
    if (chi_trial < config.max_error) {
      stop = StopReason::MaxError;
      break;
    }
    // Non-strict so that an exact fit (chi == 0) also reports MinDelta.
    if (chi * (1.0 - config.min_delta) <= chi_trial) {
      improved = chi_trial < chi;
      stop = StopReason::MinDelta;
      break;
    }
    if (all_small(step, best, config)) {
      stop = StopReason::MinStep;
      break;
    }
  }

  FitResult result;
  result.stop = stop;
  result.iterations_used = used;
  result.improved = improved;
  problem.finish(current, result);
  return result;
}

}  // namespace spotfit::detail
