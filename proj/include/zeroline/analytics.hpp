#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "zeroline/detection.hpp"

namespace zeroline {

struct GroupStats {
  Point2 center_px;
  Point2 center_mm;
  double extreme_spread_mm = 0.0;
  double mean_radius_mm = 0.0;
  std::size_t count = 0;
};

/// Center, extreme spread and mean radius of a shot group from box centers.
inline GroupStats group_stats(std::span<const Detection> holes, double mm_per_pixel) {
  if (holes.empty()) throw Error(ErrorCode::kEmptyGroup, "group needs at least one hole");
  if (!(mm_per_pixel > 0.0)) throw Error(ErrorCode::kInvalidArgument, "mm_per_pixel must be positive");
  GroupStats s;
  s.count = holes.size();
  for (const auto& h : holes) {
    const Point2 c = h.bbox.center();
    s.center_px.x += c.x;
    s.center_px.y += c.y;
  }
  s.center_px.x /= static_cast<double>(s.count);
  s.center_px.y /= static_cast<double>(s.count);
  s.center_mm = {s.center_px.x * mm_per_pixel, s.center_px.y * mm_per_pixel};

  double spread = 0.0, radius = 0.0;
  for (std::size_t i = 0; i < holes.size(); ++i) {
    const Point2 a = holes[i].bbox.center();
    radius += distance(a, s.center_px);
    for (std::size_t j = i + 1; j < holes.size(); ++j) spread = std::max(spread, distance(a, holes[j].bbox.center()));
  }
  s.extreme_spread_mm = spread * mm_per_pixel;
  s.mean_radius_mm = radius / static_cast<double>(s.count) * mm_per_pixel;
  return s;
}

struct Adjustment {
  long windage_clicks = 0;    // + right
  long elevation_clicks = 0;  // + up
  // Where the group center sits relative to the aim point once the clicks
  // are applied, in image axes (+x right, +y down).
  double residual_x_mm = 0.0;
  double residual_y_mm = 0.0;
};

struct ClickConfig {
  double windage_moa_per_click = 0.5;
  double elevation_moa_per_click = 0.5;
};

/// Millimetres subtended by one minute of angle at `distance_m` metres.
inline double mm_per_moa(double distance_m) {
  return distance_m * 1000.0 * std::tan(std::numbers::pi / 10800.0);
}

/// Clicks that move the group center onto the point of aim. Offsets are in
/// image axes (+y down); elevation clicks are reported + = up.
inline Adjustment sight_adjustment(Point2 group_center, Point2 point_of_aim, double mm_per_pixel, double distance_m,
                                   const ClickConfig& clicks) {
  if (!(distance_m > 0.0)) throw Error(ErrorCode::kNonPositiveDistance, "distance must be > 0");
  if (!(clicks.windage_moa_per_click > 0.0 && clicks.elevation_moa_per_click > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "click values must be > 0");
  }
  const double dx = (point_of_aim.x - group_center.x) * mm_per_pixel;
  const double dy = (point_of_aim.y - group_center.y) * mm_per_pixel;
  const double moa = mm_per_moa(distance_m);
  const double wclick = moa * clicks.windage_moa_per_click;
  const double eclick = moa * clicks.elevation_moa_per_click;

  // std::round is half-away-from-zero.
  Adjustment a;
  a.windage_clicks = std::lround(dx / wclick);
  const long down_clicks = std::lround(dy / eclick);
  a.elevation_clicks = -down_clicks;
  a.residual_x_mm = static_cast<double>(a.windage_clicks) * wclick - dx;
  a.residual_y_mm = static_cast<double>(down_clicks) * eclick - dy;
  return a;
}

}  // namespace zeroline
