#pragma once

#include "spotfit/gaussian_model.hpp"
#include "spotfit/image.hpp"
#include "spotfit/lm_solver.hpp"

namespace spotfit {

struct InitialEstimate {
  ShapeParams shape{};
  Amplitudes amps{};  // only the explicit five-parameter fit uses these

  friend bool operator==(const InitialEstimate&, const InitialEstimate&) = default;
};

// 3x3 moving average; border pixels average over their in-bounds neighbors.
SpotImage smooth3x3(ImageView image);

// Peak of the smoothed image for the center, its minimum for the background,
// and sigma = sqrt(M / pi) from the count M of raw pixels above the
// half-width level alpha * exp(-1/2) + beta.
InitialEstimate estimate_initial(ImageView image, const ParameterBounds& bounds);

}  // namespace spotfit
