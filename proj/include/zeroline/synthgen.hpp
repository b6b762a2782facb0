#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "zeroline/geometry.hpp"
#include "zeroline/image_ops.hpp"
#include "zeroline/rng.hpp"
#include "zeroline/segmentation.hpp"

namespace zeroline {

inline constexpr std::uint8_t kPaperLevel = 250;
inline constexpr std::uint8_t kInkLevel = 20;
inline constexpr std::uint8_t kGridLevel = 200;
inline constexpr std::uint8_t kAimMarkLevel = 160;
inline constexpr std::uint8_t kBackgroundLevel = 70;
inline constexpr double kGridSpacingMm = 25.0;
inline constexpr double kGroupSigmaMm = 15.0;

/// Layout of the canonical target, derived from its size.
struct TemplateLayout {
  int size = 800;
  int frame = 16;
  int block = 5;
  int fiducial_size = 110;
  int fiducial_inset = 36;
  int aim_half_diagonal = 25;

  explicit TemplateLayout(int canonical_size) : size(canonical_size) {
    frame = std::max(4, size / 50);
    block = std::max(3, size / 160);
    fiducial_size = block * (size / (8 * block));
    fiducial_inset = frame + std::max(4, size / 40);
    aim_half_diagonal = std::max(8, size / 32);
  }

  int fiducial_extent() const { return fiducial_size; }

  /// Top-left corners of the four fiducials (TL, TR, BR, BL).
  std::array<std::array<int, 2>, 4> fiducial_origins() const {
    const int far = size - fiducial_inset - fiducial_extent();
    return {{{fiducial_inset, fiducial_inset}, {far, fiducial_inset}, {far, far}, {fiducial_inset, far}}};
  }
};

namespace detail {

inline void fill_rect(GrayImage& img, int x0, int y0, int x1, int y1, std::uint8_t v) {
  for (int y = std::max(0, y0); y < std::min(img.height(), y1); ++y)
    for (int x = std::max(0, x0); x < std::min(img.width(), x1); ++x) img.at(x, y) = v;
}

// Random block texture in dark grays only. Every block stays below the
// paper/ink cut of the hole detector, so a fiducial is one large dark
// component, while the varied levels keep binary descriptors distinctive.
inline void draw_fiducial(GrayImage& img, const TemplateLayout& L, int ox, int oy, Rng& rng) {
  const int n = L.fiducial_extent() / L.block;
  for (int by = 0; by < n; ++by) {
    for (int bx = 0; bx < n; ++bx) {
      const auto v = static_cast<std::uint8_t>(rng.uniform_int(kInkLevel / 2, 110));
      fill_rect(img, ox + bx * L.block, oy + by * L.block, ox + (bx + 1) * L.block, oy + (by + 1) * L.block, v);
    }
  }
}

}  // namespace detail

/// Renders the blank canonical target: white field, black border frame,
/// grid lines every 25 mm, a filled diamond aim mark at the exact center and
/// four distinct corner fiducials.
inline GrayImage render_template_image(int canonical_size, double mm_per_pixel) {
  if (canonical_size < kMinCanonicalSize) throw Error(ErrorCode::kSizeTooSmall, "canonical size must be >= 256");
  if (!(mm_per_pixel > 0.0)) throw Error(ErrorCode::kInvalidArgument, "mm_per_pixel must be positive");
  const TemplateLayout L(canonical_size);
  const int S = canonical_size;
  GrayImage img(S, S, kPaperLevel);

  const double center = (S - 1) / 2.0;
  const double spacing = kGridSpacingMm / mm_per_pixel;
  if (spacing >= 4.0) {
    for (int k = -S; k <= S; ++k) {
      const long pos = std::lround(center + k * spacing);
      if (pos < L.frame || pos >= S - L.frame) continue;
      for (int t = L.frame; t < S - L.frame; ++t) {
        img.at(static_cast<int>(pos), t) = kGridLevel;
        img.at(t, static_cast<int>(pos)) = kGridLevel;
      }
    }
  }

  detail::fill_rect(img, 0, 0, S, L.frame, kInkLevel);
  detail::fill_rect(img, 0, S - L.frame, S, S, kInkLevel);
  detail::fill_rect(img, 0, 0, L.frame, S, kInkLevel);
  detail::fill_rect(img, S - L.frame, 0, S, S, kInkLevel);

  for (int y = 0; y < S; ++y)
    for (int x = 0; x < S; ++x)
      if (std::abs(x - center) + std::abs(y - center) <= L.aim_half_diagonal) img.at(x, y) = kAimMarkLevel;

  Rng rng(0xF1D0C1A1u);
  for (const auto& o : L.fiducial_origins()) detail::draw_fiducial(img, L, o[0], o[1], rng);
  return img;
}

inline TargetTemplate render_template(int canonical_size = 800, double mm_per_pixel = 0.5) {
  return make_template(render_template_image(canonical_size, mm_per_pixel), mm_per_pixel);
}

struct SequenceSpec {
  std::uint64_t seed = 0;
  int iterations = 2;
  int holes_min = 3;
  int holes_max = 4;
  double hole_radius_px = 5.5;
  double perspective_magnitude = 0.08;
  double noise_sigma = 4.0;
  double group_offset_x_mm = 0.0;
  double group_offset_y_mm = 0.0;
};

inline void validate(const SequenceSpec& s) {
  if (s.iterations < 1) throw Error(ErrorCode::kInvalidConfig, "iterations must be >= 1");
  if (s.holes_min < 0 || s.holes_min > s.holes_max) throw Error(ErrorCode::kInvalidConfig, "holes range is empty");
  if (!(s.hole_radius_px > 0.0)) throw Error(ErrorCode::kInvalidConfig, "hole radius must be positive");
  if (!(s.perspective_magnitude >= 0.0 && s.perspective_magnitude <= 0.2)) {
    throw Error(ErrorCode::kInvalidConfig, "perspective magnitude must be in [0, 0.2]");
  }
  if (!(s.noise_sigma >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "noise sigma must be >= 0");
}

struct TruthHole {
  BBox bbox;
  int iteration = 1;

  friend bool operator==(const TruthHole&, const TruthHole&) = default;
};

struct GroundTruth {
  std::string template_ref;
  int canonical_size = 0;
  double mm_per_pixel = 0.0;
  std::vector<std::string> image_refs;
  std::vector<Homography> canonical_to_raw;
  std::vector<TruthHole> holes;

  /// Holes visible in image `k` (1-based): everything punched up to iteration k.
  std::vector<TruthHole> holes_in_image(int k) const {
    std::vector<TruthHole> out;
    for (const auto& h : holes)
      if (h.iteration <= k) out.push_back(h);
    return out;
  }
};

struct Sequence {
  std::vector<GrayImage> images;
  GroundTruth truth;
};

namespace detail {

inline void punch_hole(GrayImage& canvas, Point2 c, double r, Rng& rng) {
  const int x0 = static_cast<int>(std::floor(c.x - r - 1.0)), x1 = static_cast<int>(std::ceil(c.x + r + 1.0));
  const int y0 = static_cast<int>(std::floor(c.y - r - 1.0)), y1 = static_cast<int>(std::ceil(c.y + r + 1.0));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (!canvas.contains(x, y)) continue;
      const double d = std::sqrt((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y));
      const auto dark = static_cast<std::uint8_t>(25 + rng.uniform_int(-10, 10));
      if (d <= r - 0.5) {
        canvas.at(x, y) = dark;
      } else if (d <= r + 0.5 && rng.uniform() < 0.5) {
        canvas.at(x, y) = dark;  // ragged rim
      }
    }
  }
}

inline bool hole_allowed(const TemplateLayout& L, Point2 c, double r) {
  const double m = r + 4.0;
  if (c.x < L.frame + m || c.y < L.frame + m || c.x > L.size - 1 - L.frame - m || c.y > L.size - 1 - L.frame - m) {
    return false;
  }
  for (const auto& o : L.fiducial_origins()) {
    if (c.x > o[0] - m && c.x < o[0] + L.fiducial_extent() + m && c.y > o[1] - m && c.y < o[1] + L.fiducial_extent() + m) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// Seeded firing sequence: holes are punched cumulatively into the canonical
/// target and each iteration is photographed through a fresh random
/// perspective with additive pixel noise.
inline Sequence generate_sequence(const SequenceSpec& spec, const TargetTemplate& tmpl) {
  validate(spec);
  const int S = tmpl.canonical_size;
  const TemplateLayout L(S);
  Rng rng(spec.seed);

  const double sigma_px = kGroupSigmaMm / tmpl.mm_per_pixel;
  const Point2 group_center{tmpl.aim_point.x + spec.group_offset_x_mm / tmpl.mm_per_pixel,
                            tmpl.aim_point.y + spec.group_offset_y_mm / tmpl.mm_per_pixel};
  const double r = spec.hole_radius_px;

  const double jitter = spec.perspective_magnitude * S;
  const int margin = static_cast<int>(std::lround(1.5 * jitter));
  const int raw_size = S + 2 * margin;

  Sequence seq;
  seq.truth.canonical_size = S;
  seq.truth.mm_per_pixel = tmpl.mm_per_pixel;
  GrayImage canvas = tmpl.image;

  for (int k = 1; k <= spec.iterations; ++k) {
    const int count = static_cast<int>(rng.uniform_int(spec.holes_min, spec.holes_max));
    std::vector<Point2> placed;
    for (int i = 0; i < count; ++i) {
      Point2 c;
      for (int attempt = 0; attempt < 10000; ++attempt) {
        c = {rng.normal(group_center.x, sigma_px), rng.normal(group_center.y, sigma_px)};
        if (!detail::hole_allowed(L, c, r)) continue;
        // Same-iteration holes never touch; cross-iteration overlap is allowed.
        const bool clear = std::none_of(placed.begin(), placed.end(), [&](Point2 o) { return distance(o, c) < 2.0 * r + 2.0; });
        if (clear) break;
      }
      placed.push_back(c);
      detail::punch_hole(canvas, c, r, rng);
      seq.truth.holes.push_back({{c.x - r, c.y - r, c.x + r, c.y + r}, k});
    }

    Homography h;
    if (jitter > 0.0) {
      const std::array<Point2, 4> corners{{{0, 0}, {S - 1.0, 0}, {S - 1.0, S - 1.0}, {0, S - 1.0}}};
      std::array<Correspondence, 4> pairs{};
      for (std::size_t i = 0; i < 4; ++i) {
        const double jx = rng.uniform(-jitter, jitter), jy = rng.uniform(-jitter, jitter);
        pairs[i] = {corners[i], {corners[i].x + margin + jx, corners[i].y + margin + jy}};
      }
      h = estimate_homography_dlt(pairs);
    }
    GrayImage raw = warp_perspective(canvas, h, raw_size, raw_size, kBackgroundLevel);
    if (spec.noise_sigma > 0.0) {
      for (auto& v : raw.data()) v = to_pixel(v + rng.normal(0.0, spec.noise_sigma));
    }
    seq.images.push_back(std::move(raw));
    seq.truth.image_refs.push_back("iter_" + std::to_string(k) + ".pgm");
    seq.truth.canonical_to_raw.push_back(h);
  }
  return seq;
}

// ---------------------------------------------------------------------------
// truth.json

inline nlohmann::json bbox_json(const BBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

inline nlohmann::json to_json(const GroundTruth& t) {
  nlohmann::json hs = nlohmann::json::array(), holes = nlohmann::json::array();
  for (const auto& h : t.canonical_to_raw) hs.push_back(h.to_array());
  for (const auto& h : t.holes) holes.push_back({{"bbox", bbox_json(h.bbox)}, {"iteration", h.iteration}});
  return {{"template", t.template_ref},
          {"canonical_size", t.canonical_size},
          {"mm_per_pixel", t.mm_per_pixel},
          {"images", t.image_refs},
          {"homographies", hs},
          {"holes", holes}};
}

inline GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw Error(ErrorCode::kSchemaViolation, std::string(key) + ": missing");
    return j[key];
  };
  try {
    GroundTruth t;
    t.template_ref = need("template").get<std::string>();
    t.canonical_size = need("canonical_size").get<int>();
    t.mm_per_pixel = need("mm_per_pixel").get<double>();
    t.image_refs = need("images").get<std::vector<std::string>>();
    for (const auto& h : need("homographies")) t.canonical_to_raw.push_back(Homography::from_array(h.get<std::vector<double>>()));
    for (const auto& h : need("holes")) {
      const auto b = h.at("bbox").get<std::vector<double>>();
      if (b.size() != 4) throw Error(ErrorCode::kSchemaViolation, "holes[].bbox: expected 4 numbers");
      t.holes.push_back({{b[0], b[1], b[2], b[3]}, h.at("iteration").get<int>()});
    }
    if (t.image_refs.size() != t.canonical_to_raw.size()) {
      throw Error(ErrorCode::kSchemaViolation, "images and homographies differ in length");
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("truth: ") + e.what());
  }
}

}  // namespace zeroline
