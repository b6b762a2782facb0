#pragma once

#include <cstdint>
#include <vector>

#include "zeroline/geometry.hpp"

namespace zeroline {

/// One 8-connected foreground component of a binary mask.
struct Component {
  std::vector<int> pixels;  // linear indices y * width + x
  int x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  std::size_t area() const noexcept { return pixels.size(); }
  int box_width() const noexcept { return x_max - x_min + 1; }
  int box_height() const noexcept { return y_max - y_min + 1; }

  /// Continuous-edge box around the pixel centers.
  BBox bbox() const {
    return {x_min - 0.5, y_min - 0.5, x_max + 0.5, y_max + 0.5};
  }
};

/// 8-connected labeling in raster order; components come out ordered by
/// their first pixel.
inline std::vector<Component> connected_components(const std::vector<std::uint8_t>& mask, int width, int height) {
  std::vector<Component> out;
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<int> stack;
  for (int start = 0; start < width * height; ++start) {
    if (!mask[static_cast<std::size_t>(start)] || seen[static_cast<std::size_t>(start)]) continue;
    Component c;
    c.x_min = c.x_max = start % width;
    c.y_min = c.y_max = start / width;
    stack.push_back(start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      c.pixels.push_back(p);
      const int x = p % width, y = p / width;
      c.x_min = std::min(c.x_min, x), c.x_max = std::max(c.x_max, x);
      c.y_min = std::min(c.y_min, y), c.y_max = std::max(c.y_max, y);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
          const int q = ny * width + nx;
          if (mask[static_cast<std::size_t>(q)] && !seen[static_cast<std::size_t>(q)]) {
            seen[static_cast<std::size_t>(q)] = 1;
            stack.push_back(q);
          }
        }
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace zeroline
