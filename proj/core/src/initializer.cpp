#include "spotfit/initializer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spotfit {

SpotImage smooth3x3(ImageView image) {
  validate(image);
  const PixelGrid& grid = image.grid;
  std::vector<float> out(grid.size());
  for (int y = 0; y < grid.height; ++y) {
    const int y0 = std::max(y - 1, 0);
    const int y1 = std::min(y + 1, grid.height - 1);
    for (int x = 0; x < grid.width; ++x) {
      const int x0 = std::max(x - 1, 0);
      const int x1 = std::min(x + 1, grid.width - 1);
      double sum = 0;
      for (int yy = y0; yy <= y1; ++yy) {
        for (int xx = x0; xx <= x1; ++xx) {
          sum += image.values[static_cast<std::size_t>(yy) * grid.width + xx];
        }
      }
      const int count = (y1 - y0 + 1) * (x1 - x0 + 1);
      out[static_cast<std::size_t>(y) * grid.width + x] = static_cast<float>(sum / count);
    }
  }
  return {grid, std::move(out)};
}

InitialEstimate estimate_initial(ImageView image, const ParameterBounds& bounds) {
  const SpotImage smooth = smooth3x3(image);
  const auto& s = smooth.values;
  // max_element returns the first maximum, i.e. row-major tie-break.
  const auto peak = std::max_element(s.begin(), s.end());
  const float low = *std::min_element(s.begin(), s.end());
  const auto index = static_cast<std::size_t>(peak - s.begin());

  InitialEstimate est;
  est.amps.beta = low;
  est.amps.alpha = *peak - low;

  const double threshold = est.amps.alpha * std::exp(-0.5) + est.amps.beta;
  const auto above = std::count_if(image.values.begin(), image.values.end(),
                                   [threshold](float v) { return v > threshold; });
  const double sigma = std::sqrt(static_cast<double>(above) / std::numbers::pi);

  est.shape = limit({static_cast<float>(image.grid.x_of(index)),
                     static_cast<float>(image.grid.y_of(index)), static_cast<float>(sigma)},
                    bounds, image.grid);
  return est;
}

}  // namespace spotfit
