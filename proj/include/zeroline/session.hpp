#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "zeroline/analytics.hpp"
#include "zeroline/detection.hpp"
#include "zeroline/segmentation.hpp"
#include "zeroline/tracking.hpp"

namespace zeroline {

struct SessionConfig {
  std::string session_id = "session";
  std::string template_ref;
  double distance_m = 25.0;
  double mm_per_pixel = 0.5;
  ClickConfig clicks;
  Point2 aim_point{399.5, 399.5};
  double match_threshold = kDefaultMatchThreshold;
};

struct SessionIteration {
  IterationRecord record;
  std::optional<GroupStats> group;
  std::optional<Adjustment> adjustment;
  Homography homography;
  std::size_t inlier_count = 0;
  bool used_fallback = false;
};

struct Session {
  SessionConfig config;
  std::vector<SessionIteration> iterations;
};

inline void validate(const SessionConfig& c) {
  if (c.session_id.empty()) throw Error(ErrorCode::kInvalidConfig, "session_id must not be empty");
  if (!(c.distance_m > 0.0)) throw Error(ErrorCode::kInvalidConfig, "distance_m must be > 0");
  if (!(c.mm_per_pixel > 0.0)) throw Error(ErrorCode::kInvalidConfig, "mm_per_pixel must be > 0");
  if (!(c.clicks.windage_moa_per_click > 0.0 && c.clicks.elevation_moa_per_click > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "click values must be > 0");
  }
  if (!(c.match_threshold > 0.0 && c.match_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "match_threshold must be in (0, 1]");
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json point_json(Point2 p) { return {p.x, p.y}; }

inline Point2 point_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::kSchemaViolation, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline nlohmann::json to_json(const GroupStats& g) {
  return {{"center_px", detail::point_json(g.center_px)},
          {"center_mm", detail::point_json(g.center_mm)},
          {"extreme_spread_mm", g.extreme_spread_mm},
          {"mean_radius_mm", g.mean_radius_mm},
          {"count", g.count}};
}

inline nlohmann::json to_json(const Adjustment& a) {
  return {{"windage_clicks", a.windage_clicks},
          {"elevation_clicks", a.elevation_clicks},
          {"residual_mm", {a.residual_x_mm, a.residual_y_mm}}};
}

inline nlohmann::json to_json(const Session& s) {
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& it : s.iterations) {
    nlohmann::json dets = nlohmann::json::array();
    for (const auto& d : it.record.detections) dets.push_back(detection_to_json(d));
    iters.push_back({{"index", it.record.index},
                     {"image_ref", it.record.image_ref},
                     {"detections", dets},
                     {"new_hole_indices", it.record.new_hole_indices},
                     {"hole_iterations", it.record.hole_iterations},
                     {"group_stats", it.group ? to_json(*it.group) : nlohmann::json(nullptr)},
                     {"adjustment", it.adjustment ? to_json(*it.adjustment) : nlohmann::json(nullptr)},
                     {"homography", it.homography.to_array()},
                     {"inlier_count", it.inlier_count},
                     {"used_fallback", it.used_fallback}});
  }
  const auto& c = s.config;
  return {{"session_id", c.session_id},
          {"template_ref", c.template_ref},
          {"distance_m", c.distance_m},
          {"mm_per_pixel", c.mm_per_pixel},
          {"match_threshold", c.match_threshold},
          {"click_config",
           {{"windage_moa_per_click", c.clicks.windage_moa_per_click},
            {"elevation_moa_per_click", c.clicks.elevation_moa_per_click}}},
          {"aim_point", detail::point_json(c.aim_point)},
          {"iterations", iters}};
}

inline Session session_from_json(const nlohmann::json& j) {
  try {
    Session s;
    auto& c = s.config;
    c.session_id = j.at("session_id").get<std::string>();
    c.template_ref = j.at("template_ref").get<std::string>();
    c.distance_m = j.at("distance_m").get<double>();
    c.mm_per_pixel = j.value("mm_per_pixel", 0.5);
    c.match_threshold = j.value("match_threshold", kDefaultMatchThreshold);
    c.clicks.windage_moa_per_click = j.at("click_config").at("windage_moa_per_click").get<double>();
    c.clicks.elevation_moa_per_click = j.at("click_config").at("elevation_moa_per_click").get<double>();
    c.aim_point = detail::point_from(j.at("aim_point"));
    validate(c);

    for (const auto& ij : j.at("iterations")) {
      SessionIteration it;
      it.record.index = ij.at("index").get<int>();
      it.record.image_ref = ij.at("image_ref").get<std::string>();
      const auto& dets = ij.at("detections");
      for (std::size_t i = 0; i < dets.size(); ++i) {
        it.record.detections.push_back(detection_from_json(dets[i], "iterations[].detections[" + std::to_string(i) + "]"));
      }
      it.record.new_hole_indices = ij.at("new_hole_indices").get<std::vector<std::size_t>>();
      it.record.hole_iterations =
          ij.contains("hole_iterations") ? ij["hole_iterations"].get<std::vector<int>>()
                                         : std::vector<int>(it.record.detections.size(), it.record.index);
      for (std::size_t k : it.record.new_hole_indices) {
        if (k >= it.record.detections.size()) throw Error(ErrorCode::kSchemaViolation, "new_hole_indices out of range");
      }
      if (it.record.hole_iterations.size() != it.record.detections.size()) {
        throw Error(ErrorCode::kSchemaViolation, "hole_iterations length differs from detections");
      }
      if (const auto& g = ij.at("group_stats"); !g.is_null()) {
        GroupStats gs;
        gs.center_px = detail::point_from(g.at("center_px"));
        gs.center_mm = detail::point_from(g.at("center_mm"));
        gs.extreme_spread_mm = g.at("extreme_spread_mm").get<double>();
        gs.mean_radius_mm = g.at("mean_radius_mm").get<double>();
        gs.count = g.at("count").get<std::size_t>();
        it.group = gs;
      }
      if (const auto& a = ij.at("adjustment"); !a.is_null()) {
        Adjustment adj;
        adj.windage_clicks = a.at("windage_clicks").get<long>();
        adj.elevation_clicks = a.at("elevation_clicks").get<long>();
        const Point2 r = detail::point_from(a.at("residual_mm"));
        adj.residual_x_mm = r.x, adj.residual_y_mm = r.y;
        it.adjustment = adj;
      }
      it.homography = Homography::from_array(ij.at("homography").get<std::vector<double>>());
      it.inlier_count = ij.value("inlier_count", std::size_t{0});
      it.used_fallback = ij.at("used_fallback").get<bool>();
      s.iterations.push_back(std::move(it));
    }
    for (std::size_t i = 0; i < s.iterations.size(); ++i) {
      if (s.iterations[i].record.index != static_cast<int>(i) + 1) {
        throw Error(ErrorCode::kSchemaViolation, "iteration indices must be 1..n");
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("session: ") + e.what());
  }
}

inline void save_session(const Session& s, const std::filesystem::path& path) {
  const std::string text = to_json(s).dump(2) + "\n";
  write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

inline Session load_session(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kSchemaViolation, path.string() + ": not valid JSON");
  return session_from_json(j);
}

/// New empty session, written to `path`.
inline Session create_session(const SessionConfig& config, const std::filesystem::path& path) {
  validate(config);
  Session s{config, {}};
  save_session(s, path);
  return s;
}

struct BuiltinDetector {
  BlobParams blobs;
  SplitParams split;
};

/// Detections produced elsewhere, as a Detection-File document.
struct ExternalDetections {
  nlohmann::json document;
};

using DetectorChoice = std::variant<BuiltinDetector, ExternalDetections>;

struct AppendResult {
  Session session;
  SessionIteration iteration;
};

/// Segments, detects, labels and scores one more firing iteration, then
/// persists the session. On any failure the file at `path` is untouched.
inline AppendResult append_iteration(const Session& session, const std::filesystem::path& path, const GrayImage& raw,
                                     const std::string& image_ref, const TargetTemplate& tmpl,
                                     const DetectorChoice& detector = BuiltinDetector{},
                                     const SegmentParams& seg_params = {}) {
  const NormalizedTarget norm = segment(raw, tmpl, seg_params);

  std::vector<Detection> dets;
  if (const auto* builtin = std::get_if<BuiltinDetector>(&detector)) {
    dets = detect_holes(norm, builtin->blobs, builtin->split);
  } else {
    for (auto& d : load_detections(std::get<ExternalDetections>(detector).document, norm.homography_raw_to_canonical)) {
      if (d.cls == DetectionClass::kBulletHole) dets.push_back(d);
    }
  }

  std::vector<IterationRecord> prior;
  for (const auto& it : session.iterations) prior.push_back(it.record);
  const int index = static_cast<int>(session.iterations.size()) + 1;
  SessionIteration it;
  it.record = label_next(history_of(prior), index, std::move(dets), MatchOptions{session.config.match_threshold, false},
                         image_ref);
  it.homography = norm.homography_raw_to_canonical;
  it.inlier_count = norm.inlier_count;
  it.used_fallback = norm.used_fallback;

  std::vector<Detection> fresh;
  for (std::size_t k : it.record.new_hole_indices) fresh.push_back(it.record.detections[k]);
  if (!fresh.empty()) {
    it.group = group_stats(fresh, session.config.mm_per_pixel);
    it.adjustment = sight_adjustment(it.group->center_px, session.config.aim_point, session.config.mm_per_pixel,
                                     session.config.distance_m, session.config.clicks);
  }

  Session next = session;
  next.iterations.push_back(it);
  save_session(next, path);
  return {std::move(next), std::move(it)};
}

}  // namespace zeroline
