#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spotfit {

// Upper bound on pixels per region of interest.
inline constexpr std::size_t kMaxPixels = 1024;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row-major pixel lattice. Pixel i sits at integer coordinates
// (i % width, i / width); the first pixel center is the origin.
struct PixelGrid {
  int width = 0;
  int height = 0;

  constexpr std::size_t size() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  constexpr int x_of(std::size_t i) const noexcept {
    return static_cast<int>(i % static_cast<std::size_t>(width));
  }
  constexpr int y_of(std::size_t i) const noexcept {
    return static_cast<int>(i / static_cast<std::size_t>(width));
  }
  constexpr bool valid() const noexcept {
    return width >= 1 && height >= 1 && size() <= kMaxPixels;
  }

  friend constexpr bool operator==(const PixelGrid&, const PixelGrid&) = default;
};

// Throws InvalidInput unless the grid is non-empty and within kMaxPixels.
void require_valid(const PixelGrid& grid);

// Non-owning view of one spot image.
struct ImageView {
  PixelGrid grid;
  std::span<const float> values;
};

struct SpotImage {
  PixelGrid grid;
  std::vector<float> values;

  SpotImage() = default;
  SpotImage(PixelGrid g, std::vector<float> v) : grid(g), values(std::move(v)) {}
  explicit SpotImage(ImageView view)
      : grid(view.grid), values(view.values.begin(), view.values.end()) {}

  ImageView view() const noexcept { return {grid, values}; }
  operator ImageView() const noexcept { return view(); }
};

// Checks size consistency and finiteness of every pixel.
void validate(ImageView image);

// A sequence of same-sized images stored back to back.
class ImageBatch {
 public:
  ImageBatch() = default;
  ImageBatch(PixelGrid grid, std::vector<float> pixels);
  ImageBatch(PixelGrid grid, std::size_t count);

  const PixelGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  ImageView operator[](std::size_t i) const noexcept {
    return {grid_, std::span<const float>(pixels_).subspan(i * grid_.size(), grid_.size())};
  }
  std::span<float> mutable_image(std::size_t i) noexcept {
    return std::span<float>(pixels_).subspan(i * grid_.size(), grid_.size());
  }
  std::span<const float> pixels() const noexcept { return pixels_; }

  void push_back(ImageView image);
  // First n images (n clamped to size()).
  ImageBatch prefix(std::size_t n) const;

 private:
  PixelGrid grid_{};
  std::size_t count_ = 0;
  std::vector<float> pixels_;
};

}  // namespace spotfit
