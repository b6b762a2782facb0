#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "zeroline/components.hpp"
#include "zeroline/features.hpp"
#include "zeroline/geometry.hpp"
#include "zeroline/image_ops.hpp"

namespace zeroline {

inline constexpr int kMinCanonicalSize = 256;
inline constexpr std::size_t kMinTemplateKeypoints = 50;

/// Blank canonical target plus its precomputed features.
struct TargetTemplate {
  GrayImage image;
  int canonical_size = 0;
  double mm_per_pixel = 0.5;
  Point2 aim_point;
  FeatureSet features;
};

struct FeatureParams {
  int fast_threshold = 20;
  std::size_t max_keypoints = 500;
  int max_match_distance = 64;
  double match_ratio = 0.8;
};

inline TargetTemplate make_template(GrayImage image, double mm_per_pixel, std::optional<Point2> aim_point = std::nullopt,
                                    const FeatureParams& fp = {}) {
  if (image.width() != image.height()) throw Error(ErrorCode::kInvalidArgument, "template must be square");
  if (image.width() < kMinCanonicalSize) throw Error(ErrorCode::kSizeTooSmall, "template smaller than 256 px");
  if (!(mm_per_pixel > 0.0)) throw Error(ErrorCode::kInvalidArgument, "mm_per_pixel must be positive");
  TargetTemplate t;
  t.canonical_size = image.width();
  t.mm_per_pixel = mm_per_pixel;
  t.aim_point = aim_point.value_or(Point2{(image.width() - 1) / 2.0, (image.height() - 1) / 2.0});
  t.features = extract_features(image, fp.fast_threshold, fp.max_keypoints);
  if (t.features.keypoints.size() < kMinTemplateKeypoints) {
    throw Error(ErrorCode::kInvalidArgument,
                "template has only " + std::to_string(t.features.keypoints.size()) + " keypoints (need 50)");
  }
  t.image = std::move(image);
  return t;
}

struct NormalizedTarget {
  GrayImage image;
  Homography homography_raw_to_canonical;
  std::size_t inlier_count = 0;
  bool used_fallback = false;
};

struct SegmentParams {
  FeatureParams features;
  RansacParams ransac;
  std::size_t min_matches = 8;
  double crop_padding = 0.10;
};

struct PassDiagnostics {
  bool attempted = false;
  std::size_t keypoints = 0;
  std::size_t matches = 0;
  std::size_t inliers = 0;
  std::string failure;
};

class SegmentationError : public Error {
 public:
  SegmentationError(PassDiagnostics first, PassDiagnostics second)
      : Error(ErrorCode::kSegmentationFailure, summarize(first, second)), first_(std::move(first)), second_(std::move(second)) {}

  const PassDiagnostics& first_pass() const noexcept { return first_; }
  const PassDiagnostics& second_pass() const noexcept { return second_; }

 private:
  static std::string summarize(const PassDiagnostics& a, const PassDiagnostics& b) {
    auto one = [](const char* name, const PassDiagnostics& d) {
      if (!d.attempted) return std::string(name) + " not attempted (" + d.failure + ")";
      return std::string(name) + " keypoints=" + std::to_string(d.keypoints) + " matches=" + std::to_string(d.matches) +
             " inliers=" + std::to_string(d.inliers) + " (" + d.failure + ")";
    };
    return one("pass1", a) + "; " + one("pass2", b);
  }

  PassDiagnostics first_;
  PassDiagnostics second_;
};

namespace detail {

/// Feature registration of `raw` onto the template frame.
inline std::optional<RansacResult> register_to_template(const GrayImage& raw, const TargetTemplate& tmpl,
                                                        const SegmentParams& params, PassDiagnostics& diag) {
  diag.attempted = true;
  if (raw.width() < kMinFeatureImageSize || raw.height() < kMinFeatureImageSize) {
    diag.failure = "image smaller than 64x64";
    return std::nullopt;
  }
  const FeatureSet fs = extract_features(raw, params.features.fast_threshold, params.features.max_keypoints);
  diag.keypoints = fs.keypoints.size();
  const auto matches = match_descriptors(fs.descriptors, tmpl.features.descriptors, params.features.max_match_distance,
                                         params.features.match_ratio);
  diag.matches = matches.size();
  if (matches.size() < params.min_matches) {
    diag.failure = "too few matches";
    return std::nullopt;
  }
  std::vector<Correspondence> pairs;
  pairs.reserve(matches.size());
  for (const auto& m : matches) {
    pairs.push_back({fs.keypoints[m.query_index].position, tmpl.features.keypoints[m.train_index].position});
  }
  try {
    auto result = ransac_homography(pairs, params.ransac);
    diag.inliers = result.inliers.size();
    return result;
  } catch (const Error& e) {
    diag.failure = e.what();
    return std::nullopt;
  }
}

inline int otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (auto v : img.data()) hist[v] += 1.0;
  const double total = static_cast<double>(img.data().size());
  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int threshold = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[static_cast<std::size_t>(t)];
    sum0 += t * hist[static_cast<std::size_t>(t)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) best = between, threshold = t;
  }
  return threshold;
}

inline GrayImage crop(const GrayImage& img, int x0, int y0, int w, int h) {
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = img.at(x0 + x, y0 + y);
  return out;
}

}  // namespace detail

/// Rough target box: largest bright Otsu component that fills at least half
/// its box and covers at least 5% of the image.
inline BBox coarse_locate_target(const GrayImage& raw) {
  const int t = detail::otsu_threshold(raw);
  std::vector<std::uint8_t> mask(raw.data().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = raw.data()[i] > t;
  const double min_area = 0.05 * static_cast<double>(raw.data().size());
  const Component* best = nullptr;
  const auto comps = connected_components(mask, raw.width(), raw.height());
  for (const auto& c : comps) {
    const double fill = static_cast<double>(c.area()) / (static_cast<double>(c.box_width()) * c.box_height());
    if (fill < 0.5 || static_cast<double>(c.area()) < min_area) continue;
    if (!best || c.area() > best->area()) best = &c;
  }
  if (!best) throw Error(ErrorCode::kNoCandidateRegion, "no bright region large enough");
  return best->bbox();
}

/// Two-pass registration to the canonical frame. Pass 1 registers the whole
/// image; pass 2 runs only if pass 1 fails and registers a padded crop
/// around the coarse target box.
inline NormalizedTarget segment(const GrayImage& raw, const TargetTemplate& tmpl, const SegmentParams& params = {}) {
  if (raw.width() < kMinFeatureImageSize || raw.height() < kMinFeatureImageSize) {
    throw Error(ErrorCode::kImageTooSmall, "raw image smaller than 64x64");
  }
  const int size = tmpl.canonical_size;
  PassDiagnostics first, second;

  if (auto r = detail::register_to_template(raw, tmpl, params, first)) {
    return {warp_perspective(raw, r->homography, size, size), r->homography, r->inliers.size(), false};
  }

  BBox box;
  try {
    box = coarse_locate_target(raw);
  } catch (const Error& e) {
    second.failure = e.what();
    throw SegmentationError(first, second);
  }
  const double pad_x = params.crop_padding * box.width();
  const double pad_y = params.crop_padding * box.height();
  const int x0 = std::max(0, static_cast<int>(std::floor(box.x_min - pad_x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(box.y_min - pad_y)));
  const int x1 = std::min(raw.width() - 1, static_cast<int>(std::ceil(box.x_max + pad_x)));
  const int y1 = std::min(raw.height() - 1, static_cast<int>(std::ceil(box.y_max + pad_y)));
  const GrayImage region = detail::crop(raw, x0, y0, x1 - x0 + 1, y1 - y0 + 1);

  if (auto r = detail::register_to_template(region, tmpl, params, second)) {
    const Homography h = r->homography.compose(Homography::translation(-x0, -y0));
    return {warp_perspective(raw, h, size, size), h, r->inliers.size(), true};
  }
  throw SegmentationError(first, second);
}

}  // namespace zeroline
