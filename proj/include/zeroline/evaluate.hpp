#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zeroline/metrics.hpp"
#include "zeroline/session.hpp"
#include "zeroline/synthgen.hpp"

namespace zeroline {

inline constexpr double kMaxCornerErrorPx = 2.0;

/// Pipeline output for one truth image. Empty when the image never made it
/// into the session.
struct PredictedImage {
  Homography raw_to_canonical;
  std::vector<Detection> detections;
  std::vector<int> hole_iterations;  // in truth iteration numbers
  std::vector<std::size_t> new_hole_indices;
};

struct PredictedSequence {
  std::vector<std::optional<PredictedImage>> images;  // parallel to truth.image_refs
};

struct EvalCase {
  PredictedSequence predicted;
  GroundTruth truth;
};

/// Largest displacement of the canonical corners after a round trip through
/// the truth and the predicted homographies.
inline double corner_error(const Homography& raw_to_canonical, const Homography& canonical_to_raw, int canonical_size) {
  const double s = canonical_size - 1.0;
  const std::array<Point2, 4> corners{{{0, 0}, {s, 0}, {s, s}, {0, s}}};
  double worst = 0.0;
  for (const auto& c : corners) {
    worst = std::max(worst, distance(apply_homography(raw_to_canonical, apply_homography(canonical_to_raw, c)), c));
  }
  return worst;
}

/// Maps session iterations onto truth images by file name of `image_ref`.
/// Session iteration numbers are translated to truth iteration numbers.
inline PredictedSequence predictions_from_session(const Session& s, const GroundTruth& truth) {
  auto stem = [](const std::string& ref) { return std::filesystem::path(ref).filename().string(); };
  PredictedSequence out;
  out.images.resize(truth.image_refs.size());
  std::vector<int> truth_iteration_of(s.iterations.size() + 1, 0);
  for (const auto& it : s.iterations) {
    const auto name = stem(it.record.image_ref);
    std::size_t k = 0;
    while (k < truth.image_refs.size() && stem(truth.image_refs[k]) != name) ++k;
    if (k == truth.image_refs.size()) {
      throw Error(ErrorCode::kSchemaViolation, "session image '" + it.record.image_ref + "' is not in the truth");
    }
    truth_iteration_of[static_cast<std::size_t>(it.record.index)] = static_cast<int>(k) + 1;
    PredictedImage p;
    p.raw_to_canonical = it.homography;
    p.detections = it.record.detections;
    p.new_hole_indices = it.record.new_hole_indices;
    for (int label : it.record.hole_iterations) {
      p.hole_iterations.push_back(label >= 1 && static_cast<std::size_t>(label) < truth_iteration_of.size()
                                      ? truth_iteration_of[static_cast<std::size_t>(label)]
                                      : 0);
    }
    out.images[k] = std::move(p);
  }
  return out;
}

/// A perfect prediction built from the truth itself.
inline PredictedSequence predictions_from_truth(const GroundTruth& truth) {
  PredictedSequence out;
  for (std::size_t k = 0; k < truth.image_refs.size(); ++k) {
    PredictedImage p;
    p.raw_to_canonical = truth.canonical_to_raw[k].inverse();
    const auto holes = truth.holes_in_image(static_cast<int>(k) + 1);
    for (std::size_t i = 0; i < holes.size(); ++i) {
      p.detections.push_back({holes[i].bbox, 1.0, DetectionClass::kBulletHole});
      p.hole_iterations.push_back(holes[i].iteration);
      if (holes[i].iteration == static_cast<int>(k) + 1) p.new_hole_indices.push_back(i);
    }
    out.images.push_back(std::move(p));
  }
  return out;
}

inline EvalReport evaluate(std::span<const EvalCase> cases, std::span<const double> thresholds) {
  if (cases.empty()) throw Error(ErrorCode::kEmptyDataset, "no sequences to evaluate");
  std::vector<ImageEval> det_eval;
  std::vector<LabeledImage> labeled;
  std::vector<CaseResult> results;
  double jaccard_sum = 0.0;
  EvalReport r;

  for (const auto& c : cases) {
    const auto& t = c.truth;
    if (c.predicted.images.size() != t.image_refs.size()) {
      throw Error(ErrorCode::kSchemaViolation, "prediction and truth differ in image count");
    }
    CaseResult cr{true, true, true};
    r.counts.holes += t.holes.size();
    for (std::size_t k = 0; k < t.image_refs.size(); ++k) {
      const int iter = static_cast<int>(k) + 1;
      const auto holes = t.holes_in_image(iter);
      LabeledImage li;
      std::vector<std::size_t> truth_new;
      for (std::size_t i = 0; i < holes.size(); ++i) {
        li.truth.push_back(holes[i].bbox);
        li.truth_iteration.push_back(holes[i].iteration);
        if (holes[i].iteration == iter) truth_new.push_back(i);
      }
      ++r.counts.images;

      const auto& p = c.predicted.images[k];
      bool segmented = p.has_value();
      if (segmented) {
        try {
          segmented = corner_error(p->raw_to_canonical, t.canonical_to_raw[k], t.canonical_size) <= kMaxCornerErrorPx;
        } catch (const Error&) {
          segmented = false;
        }
      }
      r.counts.targets += segmented;

      ImageEval ie;
      ie.ground_truth = li.truth;
      if (p) {
        for (std::size_t i = 0; i < p->detections.size(); ++i) {
          if (p->detections[i].cls != DetectionClass::kBulletHole) continue;
          ie.detections.push_back(p->detections[i]);
          li.predicted.push_back(p->detections[i].bbox);
          li.predicted_iteration.push_back(i < p->hole_iterations.size() ? p->hole_iterations[i] : 0);
        }
        jaccard_sum += new_hole_jaccard(li.predicted, p->new_hole_indices, li.truth, truth_new);
      } else {
        jaccard_sum += truth_new.empty() ? 1.0 : 0.0;
      }
      det_eval.push_back(ie);

      cr.segmented = cr.segmented && segmented;
      cr.count_correct = cr.count_correct && li.predicted.size() == li.truth.size();
      cr.labels_correct = cr.labels_correct && correctly_labeled(li) == li.truth.size();
      labeled.push_back(std::move(li));
    }
    results.push_back(cr);
  }

  const MeanAp m = mean_ap(det_eval, thresholds);
  r.per_threshold_ap = m.per_threshold;
  r.map50_95 = m.mean;
  r.map50 = m.per_threshold.front().second;
  for (const auto& [thr, ap] : m.per_threshold) {
    if (std::abs(thr - 0.5) < 1e-9) r.map50 = ap;
  }
  r.jaccard_mean = jaccard_sum / static_cast<double>(r.counts.images);
  r.iteration_classification_accuracy = iteration_classification_accuracy(labeled);
  r.segmentation_accuracy = static_cast<double>(r.counts.targets) / static_cast<double>(r.counts.images);
  r.full_pipeline_accuracy = full_pipeline_accuracy(results);
  return r;
}

}  // namespace zeroline
