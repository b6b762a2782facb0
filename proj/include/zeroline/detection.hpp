#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zeroline/components.hpp"
#include "zeroline/geometry.hpp"
#include "zeroline/segmentation.hpp"

namespace zeroline {

enum class DetectionClass { kBulletHole, kTarget };

inline std::string_view to_string(DetectionClass c) { return c == DetectionClass::kBulletHole ? "bullet_hole" : "target"; }

struct Detection {
  BBox bbox;
  double confidence = 0.0;
  DetectionClass cls = DetectionClass::kBulletHole;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct BlobParams {
  double min_area = 30.0;
  double max_area = 900.0;
  double min_circularity = 0.55;
  double intensity_percentile = 5.0;
};

namespace detail {

inline constexpr int kMinBlobContrast = 16;

/// Perimeter of the convex hull of the pixel squares (monotone chain).
inline double hull_perimeter(const std::vector<int>& pixels, int image_width) {
  std::vector<std::pair<int, int>> pts;
  pts.reserve(pixels.size() * 4);
  for (int p : pixels) {
    const int x = p % image_width, y = p / image_width;
    pts.insert(pts.end(), {{x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}});
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0.0;
  auto cross = [](std::pair<int, int> o, std::pair<int, int> a, std::pair<int, int> b) {
    return static_cast<long>(a.first - o.first) * (b.second - o.second) -
           static_cast<long>(a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<int, int>> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  double perimeter = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    perimeter += std::hypot(static_cast<double>(b.first - a.first), static_cast<double>(b.second - a.second));
  }
  return perimeter;
}

/// 4 pi A / P^2 with A the pixel count and P the convex-hull perimeter, so
/// a ragged rim does not count against a round hole. Clamped to [0, 1].
inline double circularity(const std::vector<int>& pixels, int image_width) {
  const double perimeter = hull_perimeter(pixels, image_width);
  if (perimeter <= 0.0) return 0.0;
  const double c = 4.0 * std::numbers::pi * static_cast<double>(pixels.size()) / (perimeter * perimeter);
  return std::clamp(c, 0.0, 1.0);
}

inline int percentile_value(const GrayImage& img, double percentile) {
  std::array<std::size_t, 256> hist{};
  for (auto v : img.data()) ++hist[v];
  const double target = percentile / 100.0 * static_cast<double>(img.data().size());
  std::size_t acc = 0;
  for (int v = 0; v < 256; ++v) {
    acc += hist[static_cast<std::size_t>(v)];
    if (static_cast<double>(acc) >= target) return v;
  }
  return 255;
}

}  // namespace detail

/// Dark-threshold cut between ink and paper: halfway between the
/// `intensity_percentile` intensity (ink level) and the median (paper level).
inline int blob_threshold(const GrayImage& img, double intensity_percentile) {
  const int ink = detail::percentile_value(img, intensity_percentile);
  const int paper = detail::percentile_value(img, 50.0);
  return (ink + paper) / 2;
}

namespace detail {

struct Blob {
  std::vector<int> pixels;
  Detection detection;
};

inline BBox pixel_box(const std::vector<int>& pixels, int width, int height) {
  int x0 = INT32_MAX, y0 = INT32_MAX, x1 = INT32_MIN, y1 = INT32_MIN;
  for (int p : pixels) {
    x0 = std::min(x0, p % width), x1 = std::max(x1, p % width);
    y0 = std::min(y0, p / width), y1 = std::max(y1, p / width);
  }
  // Clamped to the frame [0, width] x [0, height].
  return {std::max(0.0, x0 - 0.5), std::max(0.0, y0 - 0.5), std::min<double>(width, x1 + 0.5),
          std::min<double>(height, y1 + 0.5)};
}

inline void check(const BlobParams& params) {
  if (!(params.min_area < params.max_area)) throw Error(ErrorCode::kInvalidArgument, "min_area must be < max_area");
  if (!(params.min_circularity > 0.0 && params.min_circularity <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "min_circularity must be in (0, 1]");
  }
  if (!(params.intensity_percentile > 0.0 && params.intensity_percentile < 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "intensity_percentile must be in (0, 100)");
  }
}

/// Dark components passing the area and circularity filters, in component order.
inline std::vector<Blob> find_blobs(const GrayImage& img, const BlobParams& params) {
  check(params);
  std::vector<Blob> out;
  const int ink = percentile_value(img, params.intensity_percentile);
  const int paper = percentile_value(img, 50.0);
  if (paper - ink < kMinBlobContrast) return out;
  const int threshold = (ink + paper) / 2;

  std::vector<std::uint8_t> mask(img.data().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = img.data()[i] <= threshold;

  for (auto& comp : connected_components(mask, img.width(), img.height())) {
    const double area = static_cast<double>(comp.area());
    if (area < params.min_area || area > params.max_area) continue;
    const double circ = circularity(comp.pixels, img.width());
    if (circ < params.min_circularity) continue;
    Detection d{pixel_box(comp.pixels, img.width(), img.height()), circ, DetectionClass::kBulletHole};
    out.push_back({std::move(comp.pixels), d});
  }
  return out;
}

inline void sort_by_confidence(std::vector<Detection>& dets) {
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
}

/// Lloyd's k-means on pixel coordinates with farthest-point seeding.
inline std::vector<std::vector<int>> kmeans_split(const std::vector<int>& pixels, int width, std::size_t k) {
  const std::size_t n = pixels.size();
  std::vector<double> xs(n), ys(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pixels[i] % width;
    ys[i] = pixels[i] / width;
    mx += xs[i], my += ys[i];
  }
  mx /= static_cast<double>(n), my /= static_cast<double>(n);

  std::vector<Point2> centers;
  auto farthest = [&](auto&& dist) {
    std::size_t best = 0;
    double bd = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (const double d = dist(i); d > bd) bd = d, best = i;
    return Point2{xs[best], ys[best]};
  };
  centers.push_back(farthest([&](std::size_t i) { return std::hypot(xs[i] - mx, ys[i] - my); }));
  while (centers.size() < k) {
    centers.push_back(farthest([&](std::size_t i) {
      double d = INFINITY;
      for (auto c : centers) d = std::min(d, std::hypot(xs[i] - c.x, ys[i] - c.y));
      return d;
    }));
  }

  std::vector<std::size_t> label(n, 0);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double bd = INFINITY;
      for (std::size_t c = 0; c < k; ++c)
        if (const double d = std::hypot(xs[i] - centers[c].x, ys[i] - centers[c].y); d < bd) bd = d, best = c;
      changed |= best != label[i];
      label[i] = best;
    }
    if (!changed && iter > 0) break;
    std::vector<Point2> sums(k);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[label[i]].x += xs[i], sums[label[i]].y += ys[i];
      ++counts[label[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c]) centers[c] = {sums[c].x / static_cast<double>(counts[c]), sums[c].y / static_cast<double>(counts[c])};
  }

  std::vector<std::vector<int>> pieces(k);
  for (std::size_t i = 0; i < n; ++i) pieces[label[i]].push_back(pixels[i]);
  std::erase_if(pieces, [](const auto& p) { return p.empty(); });
  return pieces;
}

}  // namespace detail

/// Classical bullet-hole detector on a canonical-frame image: threshold
/// halfway between the `intensity_percentile` intensity (ink) and the median
/// (paper), 8-connected components, area and circularity filters. Each
/// surviving component is one detection with confidence = circularity,
/// sorted by confidence, descending.
inline std::vector<Detection> detect_blobs(const GrayImage& img, const BlobParams& params = {}) {
  std::vector<Detection> out;
  for (auto& b : detail::find_blobs(img, params)) out.push_back(b.detection);
  detail::sort_by_confidence(out);
  return out;
}

struct SplitParams {
  /// A blob this many times the median blob area is treated as merged holes.
  double area_ratio = 1.4;
  /// Fewer blobs than this give no reliable median; nothing is split.
  std::size_t min_reference_blobs = 3;
};

/// detect_blobs followed by splitting of overlapping holes that merged into
/// one component. A blob of area A >= area_ratio * median is divided into
/// round(A / median) pieces by k-means over its pixels.
inline std::vector<Detection> detect_holes(const GrayImage& img, const BlobParams& params = {}, const SplitParams& split = {}) {
  auto blobs = detail::find_blobs(img, params);
  std::vector<Detection> out;
  std::vector<std::size_t> areas;
  for (const auto& b : blobs) areas.push_back(b.pixels.size());
  double median = 0.0;
  if (areas.size() >= split.min_reference_blobs) {
    std::sort(areas.begin(), areas.end());
    const std::size_t m = areas.size() / 2;
    median = areas.size() % 2 ? static_cast<double>(areas[m]) : (areas[m - 1] + areas[m]) / 2.0;
  }
  for (auto& b : blobs) {
    const double ratio = median > 0.0 ? static_cast<double>(b.pixels.size()) / median : 0.0;
    if (ratio < split.area_ratio) {
      out.push_back(b.detection);
      continue;
    }
    const auto k = static_cast<std::size_t>(std::max(2L, std::lround(ratio)));
    for (const auto& piece : detail::kmeans_split(b.pixels, img.width(), k)) {
      out.push_back({detail::pixel_box(piece, img.width(), img.height()), detail::circularity(piece, img.width()),
                     DetectionClass::kBulletHole});
    }
  }
  detail::sort_by_confidence(out);
  return out;
}

inline std::vector<Detection> detect_holes(const NormalizedTarget& norm, const BlobParams& params = {},
                                           const SplitParams& split = {}) {
  return detect_holes(norm.image, params, split);
}

inline std::vector<Detection> detect_blobs(const NormalizedTarget& norm, const BlobParams& params = {}) {
  return detect_blobs(norm.image, params);
}

/// Greedy per-class non-maximum suppression in descending confidence.
inline std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "iou_threshold must be in (0, 1]");
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
  std::vector<Detection> kept;
  for (const auto& d : dets) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.cls == d.cls && iou(k.bbox, d.bbox) >= iou_threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Detection-File JSON

enum class Frame { kRaw, kNormalized };

struct DetectionFile {
  std::string image;
  Frame frame = Frame::kNormalized;
  std::vector<Detection> detections;
};

inline nlohmann::json detection_to_json(const Detection& d) {
  return {{"class", std::string(to_string(d.cls))},
          {"bbox", {d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max}},
          {"confidence", d.confidence}};
}

inline nlohmann::json to_json(const DetectionFile& f) {
  nlohmann::json dets = nlohmann::json::array();
  for (const auto& d : f.detections) dets.push_back(detection_to_json(d));
  return {{"image", f.image}, {"frame", f.frame == Frame::kRaw ? "raw" : "normalized"}, {"detections", dets}};
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, field + ": " + what);
}

}  // namespace detail

inline Detection detection_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) detail::schema_error(where, "expected object");
  if (!j.contains("class") || !j["class"].is_string()) detail::schema_error(where + ".class", "expected string");
  Detection d;
  const auto cls = j["class"].get<std::string>();
  if (cls == "bullet_hole") {
    d.cls = DetectionClass::kBulletHole;
  } else if (cls == "target") {
    d.cls = DetectionClass::kTarget;
  } else {
    detail::schema_error(where + ".class", "unknown class '" + cls + "'");
  }
  if (!j.contains("bbox") || !j["bbox"].is_array() || j["bbox"].size() != 4) {
    detail::schema_error(where + ".bbox", "expected array of 4 numbers");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j["bbox"][i].is_number()) detail::schema_error(where + ".bbox[" + std::to_string(i) + "]", "expected number");
  }
  d.bbox = {j["bbox"][0].get<double>(), j["bbox"][1].get<double>(), j["bbox"][2].get<double>(), j["bbox"][3].get<double>()};
  if (!d.bbox.valid()) detail::schema_error(where + ".bbox", "requires x_min < x_max and y_min < y_max");
  if (!j.contains("confidence") || !j["confidence"].is_number()) detail::schema_error(where + ".confidence", "expected number");
  d.confidence = j["confidence"].get<double>();
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) detail::schema_error(where + ".confidence", "must be in [0, 1]");
  return d;
}

inline DetectionFile parse_detection_file(const nlohmann::json& doc) {
  if (!doc.is_object()) detail::schema_error("$", "expected object");
  DetectionFile f;
  if (!doc.contains("image") || !doc["image"].is_string()) detail::schema_error("image", "expected string");
  f.image = doc["image"].get<std::string>();
  if (!doc.contains("frame") || !doc["frame"].is_string()) detail::schema_error("frame", "expected string");
  const auto frame = doc["frame"].get<std::string>();
  if (frame == "raw") {
    f.frame = Frame::kRaw;
  } else if (frame == "normalized") {
    f.frame = Frame::kNormalized;
  } else {
    detail::schema_error("frame", "must be \"raw\" or \"normalized\"");
  }
  if (!doc.contains("detections") || !doc["detections"].is_array()) detail::schema_error("detections", "expected array");
  for (std::size_t i = 0; i < doc["detections"].size(); ++i) {
    f.detections.push_back(detection_from_json(doc["detections"][i], "detections[" + std::to_string(i) + "]"));
  }
  return f;
}

/// Axis-aligned hull of a box's four corners under `h`.
inline BBox transform_box(const Homography& h, const BBox& b) {
  const std::array<Point2, 4> corners{{{b.x_min, b.y_min}, {b.x_max, b.y_min}, {b.x_max, b.y_max}, {b.x_min, b.y_max}}};
  BBox out{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (auto c : corners) {
    const Point2 p = apply_homography(h, c);
    out.x_min = std::min(out.x_min, p.x), out.y_min = std::min(out.y_min, p.y);
    out.x_max = std::max(out.x_max, p.x), out.y_max = std::max(out.y_max, p.y);
  }
  return out;
}

/// Validated canonical-frame detections from a Detection-File document.
/// Raw-frame files are mapped through `raw_to_canonical`.
inline std::vector<Detection> load_detections(const nlohmann::json& doc,
                                              const std::optional<Homography>& raw_to_canonical = std::nullopt) {
  DetectionFile f = parse_detection_file(doc);
  if (f.frame == Frame::kRaw) {
    if (!raw_to_canonical) throw Error(ErrorCode::kFrameMismatch, "raw-frame detections need a homography");
    for (auto& d : f.detections) d.bbox = transform_box(*raw_to_canonical, d.bbox);
  }
  return f.detections;
}

}  // namespace zeroline
