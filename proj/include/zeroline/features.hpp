#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "zeroline/brief_pattern.hpp"
#include "zeroline/error.hpp"
#include "zeroline/image.hpp"

namespace zeroline {

inline constexpr int kPatchRadius = 17;
inline constexpr int kCentroidRadius = 15;
inline constexpr int kFastArc = 9;
inline constexpr int kOrientationBins = 30;

struct Keypoint {
  Point2 position;
  double response = 0.0;
  double orientation = 0.0;  // radians in [0, 2pi)
};

/// 256-bit binary signature.
struct Descriptor {
  std::array<std::uint64_t, 4> words{};

  bool bit(int i) const { return (words[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u; }
  void set(int i) { words[static_cast<std::size_t>(i >> 6)] |= std::uint64_t{1} << (i & 63); }

  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

inline int hamming(const Descriptor& a, const Descriptor& b) {
  int d = 0;
  for (std::size_t i = 0; i < 4; ++i) d += std::popcount(a.words[i] ^ b.words[i]);
  return d;
}

struct Match {
  std::size_t query_index = 0;
  std::size_t train_index = 0;
  int distance = 0;
};

struct FeatureSet {
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;
};

namespace detail {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
inline constexpr std::array<std::array<int, 2>, 16> kFastCircle{{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

/// Segment test: some contiguous run of kFastArc circle pixels is entirely
/// brighter than center + t or entirely darker than center - t.
inline bool segment_test(const GrayImage& img, int x, int y, int t) {
  const int c = img.at(x, y);
  const int hi = c + t, lo = c - t;
  // Any 9-run covers at least two of the four compass pixels.
  int nb = 0, nd = 0;
  for (int k = 0; k < 16; k += 4) {
    const int v = img.at(x + kFastCircle[static_cast<std::size_t>(k)][0], y + kFastCircle[static_cast<std::size_t>(k)][1]);
    nb += v > hi;
    nd += v < lo;
  }
  if (nb < 2 && nd < 2) return false;

  std::array<int, 16> state{};
  for (std::size_t k = 0; k < 16; ++k) {
    const int v = img.at(x + kFastCircle[k][0], y + kFastCircle[k][1]);
    state[k] = v > hi ? 1 : (v < lo ? -1 : 0);
  }
  for (int sign : {1, -1}) {
    int run = 0;
    for (int k = 0; k < 32; ++k) {
      if (state[static_cast<std::size_t>(k & 15)] == sign) {
        if (++run >= kFastArc) return true;
      } else {
        run = 0;
      }
    }
  }
  return false;
}

/// Harris measure det(M) - 0.04 tr(M)^2 from Sobel gradients over a 7x7 window.
inline double harris_response(const GrayImage& img, int x, int y) {
  constexpr int r = 3;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int v = y - r; v <= y + r; ++v) {
    for (int u = x - r; u <= x + r; ++u) {
      const int gx = (img.at(u + 1, v - 1) + 2 * img.at(u + 1, v) + img.at(u + 1, v + 1)) -
                     (img.at(u - 1, v - 1) + 2 * img.at(u - 1, v) + img.at(u - 1, v + 1));
      const int gy = (img.at(u - 1, v + 1) + 2 * img.at(u, v + 1) + img.at(u + 1, v + 1)) -
                     (img.at(u - 1, v - 1) + 2 * img.at(u, v - 1) + img.at(u + 1, v - 1));
      sxx += static_cast<double>(gx) * gx;
      syy += static_cast<double>(gy) * gy;
      sxy += static_cast<double>(gx) * gy;
    }
  }
  // Scale keeps responses in a readable range for 8-bit input.
  constexpr double norm = 1.0 / (4.0 * 255.0 * 49.0);
  sxx *= norm, syy *= norm, sxy *= norm;
  return sxx * syy - sxy * sxy - 0.04 * (sxx + syy) * (sxx + syy);
}

/// Angle of the intensity centroid over a disk of radius kCentroidRadius.
inline double centroid_orientation(const GrayImage& img, int x, int y) {
  double m01 = 0.0, m10 = 0.0;
  for (int dy = -kCentroidRadius; dy <= kCentroidRadius; ++dy) {
    for (int dx = -kCentroidRadius; dx <= kCentroidRadius; ++dx) {
      if (dx * dx + dy * dy > kCentroidRadius * kCentroidRadius) continue;
      const double v = img.at(x + dx, y + dy);
      m10 += dx * v;
      m01 += dy * v;
    }
  }
  double a = std::atan2(m01, m10);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  if (a >= 2.0 * std::numbers::pi) a = 0.0;
  return a;
}

using RotatedPattern = std::array<PatternPair, 256>;

inline const std::array<RotatedPattern, kOrientationBins>& rotated_patterns() {
  static const auto tables = [] {
    std::array<RotatedPattern, kOrientationBins> t{};
    for (int b = 0; b < kOrientationBins; ++b) {
      const double a = b * 2.0 * std::numbers::pi / kOrientationBins;
      const double c = std::cos(a), s = std::sin(a);
      auto rot = [&](int px, int py, int& ox, int& oy) {
        ox = static_cast<int>(std::lround(px * c - py * s));
        oy = static_cast<int>(std::lround(px * s + py * c));
      };
      for (std::size_t i = 0; i < 256; ++i) {
        const auto& p = kBriefPattern[i];
        auto& o = t[static_cast<std::size_t>(b)][i];
        rot(p.px, p.py, o.px, o.py);
        rot(p.qx, p.qy, o.qx, o.qy);
      }
    }
    return t;
  }();
  return tables;
}

inline int orientation_bin(double angle) {
  const int b = static_cast<int>(std::lround(angle / (2.0 * std::numbers::pi / kOrientationBins)));
  return ((b % kOrientationBins) + kOrientationBins) % kOrientationBins;
}

/// Integral image with a one-pixel zero border.
class Integral {
 public:
  explicit Integral(const GrayImage& img) : w_(img.width() + 1), sums_(static_cast<std::size_t>(w_) * (img.height() + 1), 0) {
    for (int y = 0; y < img.height(); ++y) {
      std::int64_t row = 0;
      for (int x = 0; x < img.width(); ++x) {
        row += img.at(x, y);
        sums_[idx(x + 1, y + 1)] = sums_[idx(x + 1, y)] + row;
      }
    }
  }

  /// Sum over the 5x5 box centered at (x, y); caller keeps it in bounds.
  std::int64_t box5(int x, int y) const {
    return sums_[idx(x + 3, y + 3)] - sums_[idx(x - 2, y + 3)] - sums_[idx(x + 3, y - 2)] + sums_[idx(x - 2, y - 2)];
  }

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x); }

  int w_;
  std::vector<std::int64_t> sums_;
};

inline bool inside_margin(const GrayImage& img, Point2 p) {
  return p.x >= kPatchRadius && p.y >= kPatchRadius && p.x <= img.width() - 1 - kPatchRadius &&
         p.y <= img.height() - 1 - kPatchRadius;
}

}  // namespace detail

inline constexpr int kMinFeatureImageSize = 64;

/// FAST-9 corners ranked by Harris response, with intensity-centroid orientation.
inline std::vector<Keypoint> detect_keypoints(const GrayImage& img, int threshold = 20, std::size_t max_keypoints = 500) {
  if (img.width() < kMinFeatureImageSize || img.height() < kMinFeatureImageSize) {
    throw Error(ErrorCode::kImageTooSmall, "feature detection needs at least 64x64");
  }
  if (threshold < 1 || threshold > 255) throw Error(ErrorCode::kInvalidArgument, "threshold must be in [1, 255]");

  const int w = img.width(), h = img.height();
  std::vector<double> score(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0);
  auto at = [&](int x, int y) -> double& { return score[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)]; };

  std::vector<std::pair<int, int>> candidates;
  for (int y = kPatchRadius; y < h - kPatchRadius; ++y) {
    for (int x = kPatchRadius; x < w - kPatchRadius; ++x) {
      if (!detail::segment_test(img, x, y, threshold)) continue;
      const double r = detail::harris_response(img, x, y);
      if (r <= 0.0) continue;
      at(x, y) = r;
      candidates.emplace_back(x, y);
    }
  }

  // 3x3 non-maximum suppression; equal neighbours resolve to the first in scan order.
  std::vector<Keypoint> kps;
  for (auto [x, y] : candidates) {
    const double r = at(x, y);
    bool is_max = true;
    for (int dy = -1; dy <= 1 && is_max; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const double o = at(x + dx, y + dy);
        const bool earlier = dy < 0 || (dy == 0 && dx < 0);
        if (o > r || (o == r && earlier)) {
          is_max = false;
          break;
        }
      }
    }
    if (is_max) kps.push_back({{static_cast<double>(x), static_cast<double>(y)}, r, 0.0});
  }

  std::stable_sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) { return a.response > b.response; });
  if (kps.size() > max_keypoints) kps.resize(max_keypoints);
  for (auto& kp : kps) {
    kp.orientation = detail::centroid_orientation(img, static_cast<int>(kp.position.x), static_cast<int>(kp.position.y));
  }
  return kps;
}

/// Steered binary descriptor: 256 comparisons of 5x5 box-smoothed
/// intensities, the pattern rotated to the keypoint's 12-degree orientation bin.
inline std::vector<Descriptor> describe(const GrayImage& img, std::span<const Keypoint> kps) {
  for (const auto& kp : kps) {
    if (!detail::inside_margin(img, kp.position)) {
      throw Error(ErrorCode::kKeypointTooCloseToBorder, "keypoint within " + std::to_string(kPatchRadius) + " px of border");
    }
  }
  const detail::Integral integral(img);
  const auto& patterns = detail::rotated_patterns();
  std::vector<Descriptor> out;
  out.reserve(kps.size());
  for (const auto& kp : kps) {
    const int cx = static_cast<int>(std::lround(kp.position.x));
    const int cy = static_cast<int>(std::lround(kp.position.y));
    const auto& pattern = patterns[static_cast<std::size_t>(detail::orientation_bin(kp.orientation))];
    Descriptor d;
    for (int i = 0; i < 256; ++i) {
      const auto& p = pattern[static_cast<std::size_t>(i)];
      if (integral.box5(cx + p.px, cy + p.py) < integral.box5(cx + p.qx, cy + p.qy)) d.set(i);
    }
    out.push_back(d);
  }
  return out;
}

inline FeatureSet extract_features(const GrayImage& img, int threshold = 20, std::size_t max_keypoints = 500) {
  FeatureSet fs;
  fs.keypoints = detect_keypoints(img, threshold, max_keypoints);
  fs.descriptors = describe(img, fs.keypoints);
  return fs;
}

/// Nearest-neighbour Hamming matching with a Lowe ratio test. At most one
/// match per query descriptor.
inline std::vector<Match> match_descriptors(std::span<const Descriptor> a, std::span<const Descriptor> b,
                                            int max_distance = 64, double ratio = 0.8) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "ratio must be in (0, 1]");
  if (max_distance < 0 || max_distance > 256) throw Error(ErrorCode::kInvalidArgument, "max_distance must be in [0, 256]");
  std::vector<Match> out;
  if (b.empty()) return out;
  for (std::size_t q = 0; q < a.size(); ++q) {
    int best = 257, second = 257;
    std::size_t best_idx = 0;
    for (std::size_t t = 0; t < b.size(); ++t) {
      const int d = hamming(a[q], b[t]);
      if (d < best) {
        second = best;
        best = d;
        best_idx = t;
      } else if (d < second) {
        second = d;
      }
    }
    // A lone train descriptor has no runner-up; treat it as infinitely far.
    const double runner_up = second > 256 ? std::numeric_limits<double>::infinity() : static_cast<double>(second);
    if (best <= max_distance && best < ratio * runner_up) out.push_back({q, best_idx, best});
  }
  return out;
}

}  // namespace zeroline
