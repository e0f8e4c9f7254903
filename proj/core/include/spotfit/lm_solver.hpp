#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spotfit/gaussian_model.hpp"
#include "spotfit/image.hpp"

namespace spotfit {

enum class StopReason { MaxError, MinDelta, MinStep, NotConverged, MaxIterations };

inline constexpr std::array<StopReason, 5> kStopReasons = {
    StopReason::MaxError, StopReason::MinDelta, StopReason::MinStep, StopReason::NotConverged,
    StopReason::MaxIterations};

std::string_view to_string(StopReason reason) noexcept;
std::optional<StopReason> parse_stop_reason(std::string_view name) noexcept;

// Box constraints applied after every parameter update.
struct ParameterBounds {
  float margin = 0;  // pixels the center may leave the grid by
  float sigma_min = 0.3f;
  float sigma_max = 1.0f;

  // margin = S/2, sigma in [0.3, S] with S the longer grid side.
  static ParameterBounds defaults_for(const PixelGrid& grid) noexcept;

  void validate() const;
};

// How a step is compared against min_step.
//   Absolute: |delta_j| < min_step
//   Relative: |delta_j| < min_step * max(|p_j|, 1)
enum class StepTest { Absolute, Relative };

struct FitConfig {
  int max_iterations = 20;
  double max_error = 0;  // chi^2 early stop; 0 disables it
  double min_delta = 1e-6;
  double min_step = 1e-4;
  StepTest step_test = StepTest::Absolute;
  double lambda_init = 0.01;
  double lambda_up = 10;
  double lambda_down = 10;
  double lambda_max = 1e4;
  std::optional<ParameterBounds> bounds;  // grid defaults when empty

  ParameterBounds bounds_for(const PixelGrid& grid) const;
  void validate() const;
};

// Gauss-Newton normal equations J^T J delta = J^T r with r = g - h.
template <std::size_t K>
struct BasicNormalSystem {
  std::array<std::array<double, K>, K> jtj{};
  std::array<double, K> rhs{};
};

using NormalSystem = BasicNormalSystem<3>;

struct FitResult {
  ShapeParams shape{};
  Amplitudes amps{};
  StopReason stop = StopReason::NotConverged;
  int iterations_used = 0;
  float normalized_chi2 = 0;
  double chi2 = 0;
  // False when the final iteration found no chi^2 decrease at all.
  bool improved = true;
  bool invalid_input = false;

  friend bool operator==(const FitResult&, const FitResult&) = default;
};

// Optional record of every trial step, for diagnostics and tests.
struct FitTrace {
  struct Trial {
    double lambda = 0;       // damping used to solve for this step
    double chi2_before = 0;  // chi^2 at the backed-up parameters
    double chi2_trial = 0;
    ShapeParams trial{};
    bool accepted = false;
  };
  double initial_chi2 = 0;
  std::vector<Trial> trials;
  std::vector<double> accepted_chi2;
};

// Damped solve of (J^T J + lambda diag(J^T J)) delta = J^T r by cofactor
// inversion. Empty when a diagonal entry is not positive or the damped matrix
// is numerically singular.
std::optional<std::array<double, 3>> solve_step(const NormalSystem& sys, double lambda);

// Same system for the explicit five-parameter model, by Gaussian elimination
// with partial pivoting on the Jacobi-scaled matrix.
std::optional<std::array<double, 5>> solve_step(const BasicNormalSystem<5>& sys, double lambda);

ShapeParams limit(const ShapeParams& p, const ParameterBounds& bounds, const PixelGrid& grid);

// chi^2 / (N - 5), or chi^2 when N <= 5.
double normalized_chi(double chi2, std::size_t pixel_count) noexcept;
double normalized_chi(ImageView image, std::span<const float> model);

// Full implicit-amplitude evaluation at one parameter point.
struct ModelEvaluation {
  double chi2 = 0;
  Amplitudes amps{};
  std::array<double, 3> gradient{};
  NormalSystem system{};
};

std::optional<ModelEvaluation> evaluate_model(ImageView image, const ShapeParams& p);

// Fits (x_bar, y_bar, sigma) with amplitude and background solved at every
// evaluation. Throws InvalidInput for malformed images or configs.
FitResult fit_single(ImageView image, const ShapeParams& init, const FitConfig& config,
                     FitTrace* trace = nullptr);

// Baseline that iterates all five parameters explicitly. sigma may change
// sign; only its magnitude is bounded.
FitResult fit_explicit5(ImageView image, const ShapeParams& init_shape,
                        const Amplitudes& init_amps, const FitConfig& config,
                        FitTrace* trace = nullptr);

}  // namespace spotfit
