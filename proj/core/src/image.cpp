#include "spotfit/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spotfit {

void require_valid(const PixelGrid& grid) {
  if (grid.width < 1 || grid.height < 1) {
    throw InvalidInput("pixel grid must be at least 1x1, got " + std::to_string(grid.width) +
                       "x" + std::to_string(grid.height));
  }
  if (grid.size() > kMaxPixels) {
    throw InvalidInput("pixel grid " + std::to_string(grid.width) + "x" +
                       std::to_string(grid.height) + " exceeds " + std::to_string(kMaxPixels) +
                       " pixels");
  }
}

void validate(ImageView image) {
  require_valid(image.grid);
  if (image.values.size() != image.grid.size()) {
    throw InvalidInput("image has " + std::to_string(image.values.size()) +
                       " values for a grid of " + std::to_string(image.grid.size()));
  }
  auto bad = std::find_if(image.values.begin(), image.values.end(),
                          [](float v) { return !std::isfinite(v); });
  if (bad != image.values.end()) {
    throw InvalidInput("non-finite pixel at index " +
                       std::to_string(bad - image.values.begin()));
  }
}

ImageBatch::ImageBatch(PixelGrid grid, std::vector<float> pixels)
    : grid_(grid), pixels_(std::move(pixels)) {
  require_valid(grid_);
  if (pixels_.size() % grid_.size() != 0) {
    throw InvalidInput("pixel buffer is not a whole number of images");
  }
  count_ = pixels_.size() / grid_.size();
}

ImageBatch::ImageBatch(PixelGrid grid, std::size_t count)
    : grid_(grid), count_(count) {
  require_valid(grid_);
  pixels_.assign(count * grid_.size(), 0.0f);
}

void ImageBatch::push_back(ImageView image) {
  if (count_ == 0 && pixels_.empty() && grid_.size() == 0) {
    require_valid(image.grid);
    grid_ = image.grid;
  }
  if (!(image.grid == grid_) || image.values.size() != grid_.size()) {
    throw InvalidInput("all images in a batch must share one grid");
  }
  pixels_.insert(pixels_.end(), image.values.begin(), image.values.end());
  ++count_;
}

ImageBatch ImageBatch::prefix(std::size_t n) const {
  n = std::min(n, count_);
  return ImageBatch(grid_, std::vector<float>(pixels_.begin(),
                                              pixels_.begin() + static_cast<std::ptrdiff_t>(n * grid_.size())));
}

}  // namespace spotfit
