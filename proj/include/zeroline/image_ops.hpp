#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "zeroline/geometry.hpp"
#include "zeroline/image.hpp"

namespace zeroline {

/// Inverse-mapped perspective warp: output(u, v) = src(H^-1 (u, v)).
/// Output pixels whose preimage falls outside `src` take `fill`.
inline GrayImage warp_perspective(const GrayImage& src, const Homography& h, int out_w, int out_h,
                                  std::uint8_t fill = 0) {
  if (std::abs(determinant(h.matrix())) <= 1e-12) {
    throw Error(ErrorCode::kSingularHomography, "warp needs an invertible homography");
  }
  const Mat3 inv = h.inverse().matrix();
  GrayImage out(out_w, out_h, fill);
  const double max_x = src.width() - 1;
  const double max_y = src.height() - 1;
  for (int v = 0; v < out_h; ++v) {
    for (int u = 0; u < out_w; ++u) {
      const double w = inv[2][0] * u + inv[2][1] * v + inv[2][2];
      if (std::abs(w) <= 1e-12) continue;
      const double x = (inv[0][0] * u + inv[0][1] * v + inv[0][2]) / w;
      const double y = (inv[1][0] * u + inv[1][1] * v + inv[1][2]) / w;
      if (!(x >= 0.0 && y >= 0.0 && x <= max_x && y <= max_y)) continue;
      out.at(u, v) = to_pixel(bilinear_sample(src, {x, y}));
    }
  }
  return out;
}

enum class BoxLabel { kNewHole, kPriorHole };

struct AnnotateStyle {
  std::uint8_t new_hole = 0;
  std::uint8_t prior_hole = 140;
};

struct LabeledBox {
  BBox box;
  BoxLabel label = BoxLabel::kNewHole;
};

/// Pixel columns/rows whose centers lie inside [lo, hi], clipped to [0, limit).
inline std::pair<int, int> pixel_span(double lo, double hi, int limit) {
  const int first = std::max(0, static_cast<int>(std::ceil(lo)));
  const int last = std::min(limit - 1, static_cast<int>(std::floor(hi)));
  return {first, last};
}

/// Burns a 1-px outline of every box into a copy of `img`.
inline GrayImage annotate(const GrayImage& img, std::span<const LabeledBox> boxes, const AnnotateStyle& style = {}) {
  GrayImage out = img;
  for (const auto& lb : boxes) {
    const auto [x0, x1] = pixel_span(lb.box.x_min, lb.box.x_max, img.width());
    const auto [y0, y1] = pixel_span(lb.box.y_min, lb.box.y_max, img.height());
    if (x0 > x1 || y0 > y1) continue;
    const std::uint8_t value = lb.label == BoxLabel::kNewHole ? style.new_hole : style.prior_hole;
    // Only the edges that survive clipping are drawn.
    const bool left = lb.box.x_min >= -0.5, right = lb.box.x_max <= img.width() - 0.5;
    const bool top = lb.box.y_min >= -0.5, bottom = lb.box.y_max <= img.height() - 0.5;
    for (int x = x0; x <= x1; ++x) {
      if (top) out.at(x, y0) = value;
      if (bottom) out.at(x, y1) = value;
    }
    for (int y = y0; y <= y1; ++y) {
      if (left) out.at(x0, y) = value;
      if (right) out.at(x1, y) = value;
    }
  }
  return out;
}

}  // namespace zeroline
