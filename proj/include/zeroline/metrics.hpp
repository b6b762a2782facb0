#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <vector>

#include "json.hpp"
#include "zeroline/detection.hpp"
#include "zeroline/tracking.hpp"

namespace zeroline {

/// Detections and ground truth for one image (single class).
struct ImageEval {
  std::vector<Detection> detections;
  std::vector<BBox> ground_truth;
};

namespace detail {

struct RankedHit {
  double confidence;
  bool true_positive;
};

/// Greedy assignment on one image in the given rank order: a detection is a
/// true positive when its best still-unmatched truth box reaches the
/// threshold; that box is then consumed. Ties on IoU go to the lower index.
inline std::vector<bool> assign_true_positives(std::span<const Detection> ranked, std::span<const BBox> gts, double thr) {
  std::vector<bool> used(gts.size(), false), tp(ranked.size(), false);
  for (std::size_t d = 0; d < ranked.size(); ++d) {
    double best = -1.0;
    std::size_t best_gt = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g]) continue;
      const double v = iou(ranked[d].bbox, gts[g]);
      if (v > best) best = v, best_gt = g;
    }
    if (best >= thr) {
      used[best_gt] = true;
      tp[d] = true;
    }
  }
  return tp;
}

inline std::vector<Detection> rank(std::span<const Detection> dets) {
  std::vector<Detection> out(dets.begin(), dets.end());
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
  return out;
}

/// All-point interpolated area under the PR curve of an already ranked hit list.
inline double area_under_envelope(const std::vector<RankedHit>& hits, std::size_t total_gt) {
  const std::size_t n = hits.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += hits[i].true_positive;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(total_gt);
  }
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (recall[i] > prev_recall) {
      ap += (recall[i] - prev_recall) * precision[i];
      prev_recall = recall[i];
    }
  }
  return ap;
}

}  // namespace detail

/// AP of one image's detections at a single IoU threshold.
inline double average_precision(std::span<const Detection> dets, std::span<const BBox> gts, double iou_threshold) {
  if (gts.empty()) throw Error(ErrorCode::kNoGroundTruth, "average precision needs ground truth");
  const auto ranked = detail::rank(dets);
  const auto tp = detail::assign_true_positives(ranked, gts, iou_threshold);
  std::vector<detail::RankedHit> hits;
  for (std::size_t i = 0; i < ranked.size(); ++i) hits.push_back({ranked[i].confidence, tp[i]});
  return detail::area_under_envelope(hits, gts.size());
}

/// AP with one PR curve pooled across every image of the dataset. Equal
/// confidences keep dataset order (image, then detection).
inline double pooled_average_precision(std::span<const ImageEval> dataset, double iou_threshold) {
  std::vector<detail::RankedHit> hits;
  std::size_t total_gt = 0;
  for (const auto& img : dataset) {
    total_gt += img.ground_truth.size();
    const auto ranked = detail::rank(img.detections);
    const auto tp = detail::assign_true_positives(ranked, img.ground_truth, iou_threshold);
    for (std::size_t i = 0; i < ranked.size(); ++i) hits.push_back({ranked[i].confidence, tp[i]});
  }
  if (total_gt == 0) throw Error(ErrorCode::kNoGroundTruth, "dataset has no ground truth boxes");
  std::stable_sort(hits.begin(), hits.end(),
                   [](const detail::RankedHit& a, const detail::RankedHit& b) { return a.confidence > b.confidence; });
  return detail::area_under_envelope(hits, total_gt);
}

/// 0.50, 0.55, ..., 0.95.
inline std::vector<double> coco_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

struct MeanAp {
  std::vector<std::pair<double, double>> per_threshold;
  double mean = 0.0;
};

inline MeanAp mean_ap(std::span<const ImageEval> dataset, std::span<const double> thresholds) {
  if (dataset.empty()) throw Error(ErrorCode::kEmptyDataset, "no images");
  if (thresholds.empty()) throw Error(ErrorCode::kInvalidArgument, "no thresholds");
  MeanAp out;
  for (double t : thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::kInvalidArgument, "thresholds must be in (0, 1)");
    out.per_threshold.emplace_back(t, pooled_average_precision(dataset, t));
  }
  double sum = 0.0;
  for (const auto& [t, ap] : out.per_threshold) sum += ap;
  out.mean = sum / static_cast<double>(out.per_threshold.size());
  return out;
}

/// Predicted and true iteration labels for the holes of one image.
struct LabeledImage {
  std::vector<BBox> predicted;
  std::vector<int> predicted_iteration;
  std::vector<BBox> truth;
  std::vector<int> truth_iteration;
};

inline constexpr double kAlignmentIou = 0.5;

/// Truth holes of one image that were found and given the right iteration.
inline std::size_t correctly_labeled(const LabeledImage& img) {
  const auto align = align_to_truth(img.predicted, img.truth, kAlignmentIou);
  std::size_t correct = 0;
  for (std::size_t p = 0; p < align.size(); ++p) {
    if (align[p] < 0) continue;
    correct += img.predicted_iteration[p] == img.truth_iteration[static_cast<std::size_t>(align[p])];
  }
  return correct;
}

/// Fraction of truth holes whose aligned prediction carries the true
/// iteration. Unaligned truth holes count as errors.
inline double iteration_classification_accuracy(std::span<const LabeledImage> images) {
  std::size_t total = 0, correct = 0;
  for (const auto& img : images) {
    total += img.truth.size();
    correct += correctly_labeled(img);
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
}

/// Jaccard index of predicted vs true new-hole sets after aligning
/// predictions to truth holes. Unaligned predictions count as extra elements.
inline double new_hole_jaccard(std::span<const BBox> predicted, const std::vector<std::size_t>& predicted_new,
                               std::span<const BBox> truth, const std::vector<std::size_t>& truth_new) {
  const auto align = align_to_truth(predicted, truth, kAlignmentIou);
  std::set<long> pred_set, truth_set;
  for (std::size_t p : predicted_new) pred_set.insert(align[p] >= 0 ? align[p] : -1 - static_cast<long>(p));
  for (std::size_t t : truth_new) truth_set.insert(static_cast<long>(t));
  return jaccard_index(pred_set, truth_set);
}

/// Outcome of one end-to-end case.
struct CaseResult {
  bool segmented = false;
  bool count_correct = false;
  bool labels_correct = false;
};

inline double full_pipeline_accuracy(std::span<const CaseResult> cases) {
  if (cases.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& c : cases) ok += c.segmented && c.count_correct && c.labels_correct;
  return static_cast<double>(ok) / static_cast<double>(cases.size());
}

struct EvalCounts {
  std::size_t images = 0;
  std::size_t targets = 0;
  std::size_t holes = 0;
};

struct EvalReport {
  double map50 = 0.0;
  double map50_95 = 0.0;
  std::vector<std::pair<double, double>> per_threshold_ap;
  double jaccard_mean = 0.0;
  double iteration_classification_accuracy = 0.0;
  double segmentation_accuracy = 0.0;
  double full_pipeline_accuracy = 0.0;
  EvalCounts counts;
};

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& [t, ap] : r.per_threshold_ap) per.push_back({{"threshold", t}, {"ap", ap}});
  return {{"map50", r.map50},
          {"map50_95", r.map50_95},
          {"per_threshold_ap", per},
          {"jaccard_mean", r.jaccard_mean},
          {"iteration_classification_accuracy", r.iteration_classification_accuracy},
          {"segmentation_accuracy", r.segmentation_accuracy},
          {"full_pipeline_accuracy", r.full_pipeline_accuracy},
          {"counts", {{"images", r.counts.images}, {"targets", r.counts.targets}, {"holes", r.counts.holes}}}};
}

}  // namespace zeroline
