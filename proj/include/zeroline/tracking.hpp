#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "zeroline/detection.hpp"
#include "zeroline/geometry.hpp"

namespace zeroline {

inline constexpr double kDefaultMatchThreshold = 0.5;

struct MatchedPair {
  std::size_t prev_index = 0;
  std::size_t curr_index = 0;
  double iou = 0.0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct MatchResult {
  std::vector<MatchedPair> matched;
  std::vector<std::size_t> new_indices;
  double threshold = kDefaultMatchThreshold;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

struct MatchOptions {
  double threshold = kDefaultMatchThreshold;
  /// Each previous box may absorb at most one current box, greedily in
  /// descending IoU. Off by default.
  bool one_to_one = false;
};

/// A current box is a repeat of a previous hole when its best IoU against
/// all previous boxes reaches the threshold (>=); otherwise it is new.
/// Ties on the best IoU go to the lowest previous index.
inline MatchResult match_iterations(std::span<const Detection> prev, std::span<const Detection> curr,
                                    const MatchOptions& options = {}) {
  if (!(options.threshold > 0.0 && options.threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be in (0, 1]");
  }
  MatchResult result;
  result.threshold = options.threshold;

  if (!options.one_to_one) {
    for (std::size_t c = 0; c < curr.size(); ++c) {
      double best = 0.0;
      std::size_t best_prev = 0;
      for (std::size_t p = 0; p < prev.size(); ++p) {
        const double v = iou(prev[p].bbox, curr[c].bbox);
        if (v > best) best = v, best_prev = p;
      }
      if (!prev.empty() && best >= options.threshold) {
        result.matched.push_back({best_prev, c, best});
      } else {
        result.new_indices.push_back(c);
      }
    }
    return result;
  }

  struct Candidate {
    double iou;
    std::size_t p, c;
  };
  std::vector<Candidate> cands;
  for (std::size_t c = 0; c < curr.size(); ++c)
    for (std::size_t p = 0; p < prev.size(); ++p)
      if (const double v = iou(prev[p].bbox, curr[c].bbox); v >= options.threshold) cands.push_back({v, p, c});
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.iou > b.iou; });
  std::vector<bool> prev_used(prev.size(), false), curr_used(curr.size(), false);
  for (const auto& k : cands) {
    if (prev_used[k.p] || curr_used[k.c]) continue;
    prev_used[k.p] = curr_used[k.c] = true;
    result.matched.push_back({k.p, k.c, k.iou});
  }
  std::sort(result.matched.begin(), result.matched.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.curr_index < b.curr_index; });
  for (std::size_t c = 0; c < curr.size(); ++c)
    if (!curr_used[c]) result.new_indices.push_back(c);
  return result;
}

inline MatchResult match_iterations(std::span<const Detection> prev, std::span<const Detection> curr, double threshold) {
  return match_iterations(prev, curr, MatchOptions{threshold, false});
}

struct IterationRecord {
  int index = 1;
  std::string image_ref;
  std::vector<Detection> detections;
  std::vector<std::size_t> new_hole_indices;
  /// Iteration in which each detection was first seen.
  std::vector<int> hole_iterations;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

/// Every hole seen so far with the iteration that introduced it.
struct HoleHistory {
  std::vector<Detection> holes;
  std::vector<int> first_seen;
};

inline HoleHistory history_of(std::span<const IterationRecord> records) {
  HoleHistory h;
  for (const auto& r : records) {
    for (std::size_t i = 0; i < r.detections.size(); ++i) {
      h.holes.push_back(r.detections[i]);
      h.first_seen.push_back(i < r.hole_iterations.size() ? r.hole_iterations[i] : r.index);
    }
  }
  return h;
}

/// Labels one more iteration against everything seen in earlier ones.
inline IterationRecord label_next(const HoleHistory& history, int index, std::vector<Detection> detections,
                                  const MatchOptions& options = {}, std::string image_ref = {}) {
  IterationRecord rec;
  rec.index = index;
  rec.image_ref = std::move(image_ref);
  const MatchResult m = match_iterations(history.holes, detections, options);
  rec.new_hole_indices = m.new_indices;
  rec.hole_iterations.assign(detections.size(), index);
  for (const auto& pair : m.matched) rec.hole_iterations[pair.curr_index] = history.first_seen[pair.prev_index];
  rec.detections = std::move(detections);
  return rec;
}

/// Iteration 1 is all new; iteration k is matched against the accumulated
/// boxes of iterations 1..k-1.
inline std::vector<IterationRecord> label_session(const std::vector<std::vector<Detection>>& iterations,
                                                  double threshold = kDefaultMatchThreshold) {
  std::vector<IterationRecord> records;
  HoleHistory history;
  for (std::size_t k = 0; k < iterations.size(); ++k) {
    records.push_back(label_next(history, static_cast<int>(k) + 1, iterations[k], MatchOptions{threshold, false}));
    const auto& r = records.back();
    history.holes.insert(history.holes.end(), r.detections.begin(), r.detections.end());
    history.first_seen.insert(history.first_seen.end(), r.hole_iterations.begin(), r.hole_iterations.end());
  }
  return records;
}

/// |A intersect B| / |A union B|; 1 when both are empty.
template <typename T>
double jaccard_index(const std::set<T>& predicted, const std::set<T>& truth) {
  if (predicted.empty() && truth.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& v : predicted) inter += truth.count(v);
  return static_cast<double>(inter) / static_cast<double>(predicted.size() + truth.size() - inter);
}

/// Greedy one-to-one alignment of predicted boxes to truth boxes in
/// descending IoU, keeping pairs with IoU >= min_iou. Result maps each
/// predicted index to a truth index or -1.
inline std::vector<long> align_to_truth(std::span<const BBox> predicted, std::span<const BBox> truth, double min_iou = 0.5) {
  struct Candidate {
    double iou;
    std::size_t p, t;
  };
  std::vector<Candidate> cands;
  for (std::size_t p = 0; p < predicted.size(); ++p)
    for (std::size_t t = 0; t < truth.size(); ++t)
      if (const double v = iou(predicted[p], truth[t]); v >= min_iou) cands.push_back({v, p, t});
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.iou > b.iou; });
  std::vector<long> out(predicted.size(), -1);
  std::vector<bool> used(truth.size(), false);
  for (const auto& c : cands) {
    if (out[c.p] >= 0 || used[c.t]) continue;
    out[c.p] = static_cast<long>(c.t);
    used[c.t] = true;
  }
  return out;
}

}  // namespace zeroline
