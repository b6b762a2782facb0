#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "zeroline/error.hpp"
#include "zeroline/image.hpp"
#include "zeroline/rng.hpp"

namespace zeroline {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr Mat3 kIdentity3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

inline Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

inline double determinant(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Projective map between two image planes. Stored normalized: m[2][2] = 1
/// when it is not vanishing, otherwise unit Frobenius norm.
class Homography {
 public:
  Homography() : m_(kIdentity3) {}

  explicit Homography(const Mat3& m) : m_(normalized(m)) {
    for (const auto& row : m_)
      for (double v : row)
        if (!std::isfinite(v)) throw Error(ErrorCode::kNumericalFailure, "non-finite homography entry");
    if (std::abs(determinant(m_)) <= 1e-12) {
      throw Error(ErrorCode::kSingularHomography, "|det| <= 1e-12");
    }
  }

  static Homography translation(double tx, double ty) {
    return Homography(Mat3{{{1, 0, tx}, {0, 1, ty}, {0, 0, 1}}});
  }

  /// Row-major 9-element form used by the JSON files.
  static Homography from_array(std::span<const double> v) {
    if (v.size() != 9) throw Error(ErrorCode::kInvalidArgument, "homography needs 9 entries");
    Mat3 m{};
    for (int i = 0; i < 9; ++i) m[i / 3][i % 3] = v[static_cast<std::size_t>(i)];
    return Homography(m);
  }
  static Homography from_array(const std::array<double, 9>& v) { return from_array(std::span<const double>(v)); }

  std::array<double, 9> to_array() const {
    std::array<double, 9> v{};
    for (int i = 0; i < 9; ++i) v[static_cast<std::size_t>(i)] = m_[i / 3][i % 3];
    return v;
  }

  const Mat3& matrix() const noexcept { return m_; }
  double operator()(int r, int c) const { return m_[r][c]; }

  Homography inverse() const {
    const Mat3& m = m_;
    const double det = determinant(m);
    Mat3 inv{};
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return Homography(inv);
  }

  /// (*this) after `first`: maps p to this(first(p)).
  Homography compose(const Homography& first) const { return Homography(multiply(m_, first.m_)); }

 private:
  static Mat3 normalized(Mat3 m) {
    if (std::abs(m[2][2]) > 1e-9) {
      const double s = m[2][2];
      for (auto& row : m)
        for (double& v : row) v /= s;
    } else {
      double norm = 0.0;
      for (const auto& row : m)
        for (double v : row) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 0.0)
        for (auto& row : m)
          for (double& v : row) v /= norm;
    }
    return m;
  }

  Mat3 m_;
};

/// Axis-aligned box with continuous edges; area has no +1 pixel inflation.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  Point2 center() const noexcept { return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0}; }
  bool valid() const noexcept {
    return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) && std::isfinite(y_max) &&
           x_min < x_max && y_min < y_max;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Intersection over union of two valid boxes.
inline double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

inline Point2 apply_homography(const Homography& h, Point2 p) {
  const auto& m = h.matrix();
  const double w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
  if (std::abs(w) <= 1e-12) throw Error(ErrorCode::kPointAtInfinity, "projective weight ~ 0");
  return {(m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w, (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w};
}

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Source point -> destination point.
struct Correspondence {
  Point2 src;
  Point2 dst;
};

namespace detail {

inline double triangle_area(Point2 a, Point2 b, Point2 c) {
  return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

inline constexpr double kCollinearArea = 1e-9;

inline bool has_collinear_triple(std::span<const Point2> pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      for (std::size_t k = j + 1; k < pts.size(); ++k)
        if (triangle_area(pts[i], pts[j], pts[k]) <= kCollinearArea) return true;
  return false;
}

inline bool all_collinear(std::span<const Point2> pts) {
  if (pts.size() < 3) return true;
  // Anchor on the farthest pair so the area test is well scaled.
  std::size_t a = 0, b = 1;
  double best = -1.0;
  for (std::size_t j = 1; j < pts.size(); ++j) {
    const double d = distance(pts[0], pts[j]);
    if (d > best) best = d, b = j;
  }
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (triangle_area(pts[a], pts[b], pts[k]) > kCollinearArea) return false;
  return true;
}

// Hartley conditioning: centroid to origin, RMS distance sqrt(2).
inline Mat3 conditioning_transform(std::span<const Point2> pts) {
  double cx = 0.0, cy = 0.0;
  for (auto p : pts) cx += p.x, cy += p.y;
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double ss = 0.0;
  for (auto p : pts) ss += (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
  const double rms = std::sqrt(ss / static_cast<double>(pts.size()));
  if (!(rms > 0.0)) throw Error(ErrorCode::kDegenerateConfiguration, "coincident points");
  const double s = std::sqrt(2.0) / rms;
  return Mat3{{{s, 0, -s * cx}, {0, s, -s * cy}, {0, 0, 1}}};
}

inline Point2 transform(const Mat3& t, Point2 p) {
  const double w = t[2][0] * p.x + t[2][1] * p.y + t[2][2];
  return {(t[0][0] * p.x + t[0][1] * p.y + t[0][2]) / w, (t[1][0] * p.x + t[1][1] * p.y + t[1][2]) / w};
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. On return `a`
/// holds the eigenvalues on its diagonal and the columns of `v` the vectors.
template <std::size_t N>
void jacobi_eigen(std::array<std::array<double, N>, N>& a, std::array<std::array<double, N>, N>& v) {
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) v[i][j] = i == j ? 1.0 : 0.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      diag += a[i][i] * a[i][i];
      for (std::size_t j = i + 1; j < N; ++j) off += a[i][j] * a[i][j];
    }
    if (off <= 1e-30 * diag || off == 0.0) return;

    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace detail

/// Normalized DLT. Four pairs interpolate exactly; more pairs give the
/// algebraic least-squares fit.
inline Homography estimate_homography_dlt(std::span<const Correspondence> pairs) {
  if (pairs.size() < 4) throw Error(ErrorCode::kTooFewMatches, "DLT needs at least 4 correspondences");

  std::vector<Point2> src, dst;
  src.reserve(pairs.size());
  dst.reserve(pairs.size());
  for (const auto& c : pairs) src.push_back(c.src), dst.push_back(c.dst);

  const bool degenerate = pairs.size() == 4 ? detail::has_collinear_triple(src) || detail::has_collinear_triple(dst)
                                            : detail::all_collinear(src) || detail::all_collinear(dst);
  if (degenerate) throw Error(ErrorCode::kDegenerateConfiguration, "collinear points");

  const Mat3 ts = detail::conditioning_transform(src);
  const Mat3 td = detail::conditioning_transform(dst);

  std::array<std::array<double, 9>, 9> ata{};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Point2 s = detail::transform(ts, src[i]);
    const Point2 d = detail::transform(td, dst[i]);
    const std::array<double, 9> r1{-s.x, -s.y, -1.0, 0.0, 0.0, 0.0, d.x * s.x, d.x * s.y, d.x};
    const std::array<double, 9> r2{0.0, 0.0, 0.0, -s.x, -s.y, -1.0, d.y * s.x, d.y * s.y, d.y};
    for (std::size_t a = 0; a < 9; ++a)
      for (std::size_t b = 0; b < 9; ++b) ata[a][b] += r1[a] * r1[b] + r2[a] * r2[b];
  }

  std::array<std::array<double, 9>, 9> vecs{};
  detail::jacobi_eigen(ata, vecs);
  std::size_t smallest = 0;
  for (std::size_t i = 1; i < 9; ++i)
    if (ata[i][i] < ata[smallest][smallest]) smallest = i;

  Mat3 hn{};
  for (int i = 0; i < 9; ++i) hn[i / 3][i % 3] = vecs[static_cast<std::size_t>(i)][smallest];

  // Undo conditioning: H = Td^-1 * Hn * Ts.
  const Mat3 td_inv{{{1.0 / td[0][0], 0, -td[0][2] / td[0][0]}, {0, 1.0 / td[1][1], -td[1][2] / td[1][1]}, {0, 0, 1}}};
  const Mat3 h = multiply(td_inv, multiply(hn, ts));
  for (const auto& row : h)
    for (double v : row)
      if (!std::isfinite(v)) throw Error(ErrorCode::kNumericalFailure, "non-finite DLT solution");
  try {
    return Homography(h);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSingularHomography)
      throw Error(ErrorCode::kNumericalFailure, "DLT solution is singular");
    throw;
  }
}

struct RansacParams {
  int max_iterations = 2000;
  double inlier_threshold = 3.0;
  int min_inliers = 15;
  std::uint64_t seed = 0;
};

struct RansacResult {
  Homography homography;
  std::vector<std::size_t> inliers;
};

/// Reprojection distance of a correspondence under `h`; infinity when the
/// source maps to the line at infinity.
inline double reprojection_error(const Homography& h, const Correspondence& c) {
  const auto& m = h.matrix();
  const double w = m[2][0] * c.src.x + m[2][1] * c.src.y + m[2][2];
  if (std::abs(w) <= 1e-12) return std::numeric_limits<double>::infinity();
  const double x = (m[0][0] * c.src.x + m[0][1] * c.src.y + m[0][2]) / w;
  const double y = (m[1][0] * c.src.x + m[1][1] * c.src.y + m[1][2]) / w;
  return std::hypot(x - c.dst.x, y - c.dst.y);
}

/// Seeded RANSAC over 4-point DLT fits. Sample i is drawn from a generator
/// keyed on (seed, i), so the outcome depends only on the inputs.
inline RansacResult ransac_homography(std::span<const Correspondence> matches, const RansacParams& params) {
  if (params.max_iterations < 1 || !(params.inlier_threshold > 0.0) || params.min_inliers < 4) {
    throw Error(ErrorCode::kInvalidArgument, "invalid RANSAC parameters");
  }
  if (matches.size() < 4) throw Error(ErrorCode::kTooFewMatches, std::to_string(matches.size()) + " matches");

  const std::size_t n = matches.size();
  std::vector<std::size_t> best;
  std::vector<std::size_t> current;
  current.reserve(n);

  for (int it = 0; it < params.max_iterations; ++it) {
    Rng rng(params.seed ^ splitmix64(static_cast<std::uint64_t>(it) + 0x51ED2701ull));
    std::array<std::size_t, 4> idx{};
    for (std::size_t k = 0; k < 4; ++k) {
      bool fresh;
      do {
        idx[k] = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        fresh = std::find(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx[k]) ==
                idx.begin() + static_cast<std::ptrdiff_t>(k);
      } while (!fresh);
    }
    const std::array<Correspondence, 4> sample{matches[idx[0]], matches[idx[1]], matches[idx[2]], matches[idx[3]]};

    std::optional<Homography> model;
    try {
      model = estimate_homography_dlt(sample);
    } catch (const Error&) {
      continue;
    }

    current.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (reprojection_error(*model, matches[i]) <= params.inlier_threshold) current.push_back(i);
    if (current.size() > best.size()) best = current;
  }

  if (best.size() < static_cast<std::size_t>(params.min_inliers)) {
    throw Error(ErrorCode::kNoConsensus, "best consensus " + std::to_string(best.size()) + " < " +
                                             std::to_string(params.min_inliers));
  }

  std::vector<Correspondence> support;
  support.reserve(best.size());
  for (std::size_t i : best) support.push_back(matches[i]);
  return {estimate_homography_dlt(support), std::move(best)};
}

}  // namespace zeroline
