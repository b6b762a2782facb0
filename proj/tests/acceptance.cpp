// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "support.hpp"
#include "zeroline/analytics.hpp"
#include "zeroline/cli.hpp"
#include "zeroline/evaluate.hpp"
#include "zeroline/geometry.hpp"
#include "zeroline/session.hpp"

using namespace zeroline;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4, bool sci = false) {
  std::ostringstream os;
  os.setf(sci ? std::ios::scientific : std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

Homography random_homography(Rng& rng) {
  return Homography(Mat3{{{rng.uniform(0.8, 1.2), rng.uniform(-0.2, 0.2), rng.uniform(-50, 50)},
                          {rng.uniform(-0.2, 0.2), rng.uniform(0.8, 1.2), rng.uniform(-50, 50)},
                          {rng.uniform(-2e-4, 2e-4), rng.uniform(-2e-4, 2e-4), 1.0}}});
}

BBox random_box(Rng& rng) {
  const double x = rng.uniform(0, 40), y = rng.uniform(0, 40);
  return {x, y, x + rng.uniform(2, 30), y + rng.uniform(2, 30)};
}

bool inside(const BBox& b, double x, double y) { return x >= b.x_min && x < b.x_max && y >= b.y_min && y < b.y_max; }

// Jittered-grid Monte Carlo: one uniform sample in each cell of an n x n grid
// over the union's bounding rectangle.
double iou_monte_carlo(const BBox& a, const BBox& b, Rng& rng, int n) {
  const double x0 = std::min(a.x_min, b.x_min), y0 = std::min(a.y_min, b.y_min);
  const double cw = (std::max(a.x_max, b.x_max) - x0) / n, ch = (std::max(a.y_max, b.y_max) - y0) / n;
  long both = 0, either = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = x0 + (i + rng.uniform()) * cw, y = y0 + (j + rng.uniform()) * ch;
      const bool ia = inside(a, x, y), ib = inside(b, x, y);
      both += ia && ib;
      either += ia || ib;
    }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

void criterion_1() {
  const auto t0 = Clock::now();
  Rng boxes(101), samples(202);
  double worst_iou = 0;
  for (int i = 0; i < 200; ++i) {
    BBox a = random_box(boxes), b = random_box(boxes);
    worst_iou = std::max(worst_iou, std::abs(iou(a, b) - iou_monte_carlo(a, b, samples, 1000)));
  }
  Rng rng(303);
  double worst_dlt = 0;
  for (int i = 0; i < 100; ++i) {
    const Homography h = random_homography(rng);
    std::vector<Correspondence> pairs;
    const int n = 4 + static_cast<int>(rng.uniform_int(0, 20));
    for (int k = 0; k < n; ++k) {
      const Point2 p{rng.uniform(0, 800), rng.uniform(0, 800)};
      pairs.push_back({p, apply_homography(h, p)});
    }
    const Homography e = estimate_homography_dlt(pairs);
    for (int k = 0; k < 20; ++k) {
      const Point2 p{rng.uniform(0, 800), rng.uniform(0, 800)};
      worst_dlt = std::max(worst_dlt, distance(apply_homography(e, p), apply_homography(h, p)));
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst_iou <= 1e-3 && worst_dlt < 1e-6 && secs < 10,
         "IoU vs 1e6-sample Monte Carlo on 200 pairs, max error " + fmt(worst_iou, 6) + " (<= 0.001); DLT on 100 homographies, max error " +
             fmt(worst_dlt, 2, true) + " px (< 1e-6); " + fmt(secs, 1) + " s (< 10)");
}

void criterion_2() {
  const auto t0 = Clock::now();
  auto run_trials = [](std::vector<std::vector<std::size_t>>* found) {
    Rng rng(404);
    int exact = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Homography h = random_homography(rng);
      std::vector<Correspondence> all;
      std::vector<std::size_t> planted;
      while (all.size() < 80) {
        if (rng.uniform() < 0.5 && planted.size() < 40) {
          const Point2 p{rng.uniform(0, 800), rng.uniform(0, 800)};
          planted.push_back(all.size());
          all.push_back({p, apply_homography(h, p)});
        } else if (all.size() - planted.size() < 40) {
          const Correspondence c{{rng.uniform(0, 800), rng.uniform(0, 800)}, {rng.uniform(0, 800), rng.uniform(0, 800)}};
          if (reprojection_error(h, c) > 3.0) all.push_back(c);
        }
      }
      RansacParams p;
      p.inlier_threshold = 3.0;
      p.seed = static_cast<std::uint64_t>(trial);
      try {
        auto r = ransac_homography(all, p);
        std::sort(r.inliers.begin(), r.inliers.end());
        exact += r.inliers == planted;
        found->push_back(r.inliers);
      } catch (const Error&) {
        found->push_back({});
      }
    }
    return exact;
  };
  std::vector<std::vector<std::size_t>> first, second;
  const int exact = run_trials(&first);
  run_trials(&second);
  const double secs = seconds_since(t0);
  report(2, exact >= 49 && first == second && secs < 20,
         "RANSAC at 50% outliers recovered the exact inlier set in " + std::to_string(exact) +
             "/50 trials (>= 49); repeat run identical: " + (first == second ? "yes" : "no") + "; " + fmt(secs, 1) + " s (< 20)");
}

struct SuiteResult {
  EvalReport report;
  std::size_t images = 0, segmented = 0;
  double worst_corner = 0;
  double seconds = 0;
};

SuiteResult run_suite() {
  const auto t0 = Clock::now();
  const TargetTemplate& tmpl = zltest::default_template();
  zltest::TempDir dir("acceptance_suite");
  std::vector<EvalCase> cases;
  SuiteResult res;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SequenceSpec spec;
    spec.seed = seed;
    Sequence seq = generate_sequence(spec, tmpl);
    const fs::path path = dir / ("s" + std::to_string(seed) + ".json");
    SessionConfig cfg;
    cfg.mm_per_pixel = tmpl.mm_per_pixel;
    cfg.aim_point = tmpl.aim_point;
    Session s = create_session(cfg, path);
    for (std::size_t k = 0; k < seq.images.size(); ++k) {
      ++res.images;
      try {
        s = append_iteration(s, path, seq.images[k], seq.truth.image_refs[k], tmpl).session;
        const double err = corner_error(s.iterations.back().homography, seq.truth.canonical_to_raw[k], tmpl.canonical_size);
        ++res.segmented;
        res.worst_corner = std::max(res.worst_corner, err);
      } catch (const Error&) {
      }
    }
    cases.push_back({predictions_from_session(s, seq.truth), seq.truth});
  }
  const auto thresholds = coco_thresholds();
  res.report = evaluate(cases, thresholds);
  res.seconds = seconds_since(t0);
  return res;
}

double crafted_map50() {
  GroundTruth t;
  t.canonical_size = 800;
  t.mm_per_pixel = 0.5;
  t.image_refs = {"iter_1.pgm"};
  t.canonical_to_raw = {Homography()};
  t.holes = {{{100, 100, 110, 110}, 1}, {{200, 200, 210, 210}, 1}, {{300, 300, 310, 310}, 1}};
  PredictedImage p;
  p.detections = {{{100, 100, 110, 110}, 0.9, DetectionClass::kBulletHole},
                  {{600, 600, 610, 610}, 0.8, DetectionClass::kBulletHole},
                  {{200, 200, 210, 210}, 0.7, DetectionClass::kBulletHole},
                  {{300, 300, 310, 310}, 0.6, DetectionClass::kBulletHole}};
  p.hole_iterations = {1, 1, 1, 1};
  p.new_hole_indices = {0, 1, 2, 3};
  const std::vector<EvalCase> cases{{PredictedSequence{{p}}, t}};
  const std::vector<double> thr{0.5};
  return evaluate(cases, thr).map50;
}

bool threshold_monotone(int trials) {
  Rng rng(505);
  auto holes = [&](int n) {
    std::vector<Detection> out;
    for (int i = 0; i < n; ++i) {
      const double x = rng.uniform(0, 100), y = rng.uniform(0, 100), s = rng.uniform(5, 15);
      out.push_back({{x, y, x + s, y + s}, 1.0, DetectionClass::kBulletHole});
    }
    return out;
  };
  for (int trial = 0; trial < trials; ++trial) {
    const auto prev = holes(static_cast<int>(rng.uniform_int(1, 10)));
    auto curr = holes(static_cast<int>(rng.uniform_int(1, 10)));
    for (const auto& p : prev) {
      const double dx = rng.uniform(-3, 3), dy = rng.uniform(-3, 3);
      curr.push_back({{p.bbox.x_min + dx, p.bbox.y_min + dy, p.bbox.x_max + dx, p.bbox.y_max + dy}, 1.0, DetectionClass::kBulletHole});
    }
    double lo = rng.uniform(0.05, 1.0), hi = rng.uniform(0.05, 1.0);
    if (lo > hi) std::swap(lo, hi);
    const auto a = match_iterations(prev, curr, lo).new_indices, b = match_iterations(prev, curr, hi).new_indices;
    if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) return false;
  }
  return true;
}

std::string cli_chain(const fs::path& root) {
  std::ostringstream out, err;
  auto call = [&](std::vector<std::string> args) {
    if (cli::run(args, out, err) != 0) throw std::runtime_error("cli failed: " + err.str());
  };
  call({"synth", "--seed", "77", "--sequences", "2", "--out", root.string()});
  for (int i = 0; i < 2; ++i) {
    const fs::path seq = root / cli::sequence_dir_name(i);
    for (int k = 1; k <= 2; ++k) {
      std::vector<std::string> a{"track", "--session", (seq / "session.json").string(), "--image",
                                 (seq / ("iter_" + std::to_string(k) + ".pgm")).string(), "--template",
                                 (root / "template.pgm").string()};
      if (k == 1) a.push_back("--new");
      call(a);
    }
  }
  call({"eval", "--pred", root.string(), "--truth", root.string(), "--report", (root / "report.json").string()});
  const auto bytes = zltest::slurp(root / "report.json");
  return {bytes.begin(), bytes.end()};
}

double moa_oracle(double d) { return d * 1000.0 * std::tan((1.0 / 60.0) * (M_PI / 180.0)); }

}  // namespace

int main() {
  criterion_1();
  criterion_2();

  const SuiteResult suite = run_suite();
  const EvalReport& r = suite.report;
  const double seg_rate = static_cast<double>(suite.segmented) / static_cast<double>(suite.images);
  report(3, seg_rate >= 0.95 && suite.worst_corner < 2.0 && suite.seconds < 60,
         "50 default sequences: segmented " + std::to_string(suite.segmented) + "/" + std::to_string(suite.images) +
             " images (>= 95%), worst corner error " + fmt(suite.worst_corner, 3) + " px (< 2), " + fmt(suite.seconds, 1) +
             " s (< 60)");

  const double crafted = crafted_map50();
  report(4, r.map50 >= 0.95 && std::abs(crafted - 0.8333) < 1e-4,
         "suite mAP50 " + fmt(r.map50) + " (>= 0.95); crafted TP,FP,TP,TP ranking AP " + fmt(crafted) + " (== 0.8333)");

  const bool monotone = threshold_monotone(1000);
  report(5, r.jaccard_mean >= 0.95 && r.iteration_classification_accuracy >= 0.95 && monotone,
         "new-hole Jaccard " + fmt(r.jaccard_mean) + " (>= 0.95), iteration accuracy " +
             fmt(r.iteration_classification_accuracy) + " (>= 0.95), new set monotone in threshold over 1000 pairs: " +
             (monotone ? "yes" : "no"));

  report(6, r.full_pipeline_accuracy >= 0.85 && r.full_pipeline_accuracy <= r.segmentation_accuracy,
         "full pipeline accuracy " + fmt(r.full_pipeline_accuracy) + " (>= 0.85, <= segmentation accuracy " +
             fmt(r.segmentation_accuracy) + ")");

  bool same = false;
  std::string why;
  try {
    zltest::TempDir a("acceptance_chain_a"), b("acceptance_chain_b");
    const std::string ra = cli_chain(a.path()), rb = cli_chain(b.path());
    same = !ra.empty() && ra == rb;
  } catch (const std::exception& e) {
    why = std::string(" (") + e.what() + ")";
  }
  report(7, same, std::string("synth, track, eval chain twice with the same seed gives byte-identical reports: ") +
                      (same ? "yes" : "no") + why);

  Rng rng(808);
  double worst_excess = 0;
  for (int i = 0; i < 1000; ++i) {
    const double mm = rng.uniform(0.2, 1.0), d = rng.uniform(10, 300);
    const ClickConfig cc{rng.uniform(0.125, 1.0), rng.uniform(0.125, 1.0)};
    const Point2 aim{400, 400}, center{400 + rng.uniform(-300, 300), 400 + rng.uniform(-300, 300)};
    const Adjustment a = sight_adjustment(center, aim, mm, d, cc);
    const double wclick = cc.windage_moa_per_click * moa_oracle(d), eclick = cc.elevation_moa_per_click * moa_oracle(d);
    const double after_x = (center.x - aim.x) * mm + a.windage_clicks * wclick;
    const double after_y = (center.y - aim.y) * mm - a.elevation_clicks * eclick;
    worst_excess = std::max({worst_excess, std::abs(after_x) - wclick / 2, std::abs(after_y) - eclick / 2});
  }
  const double moa25 = mm_per_moa(25.0);
  report(8, std::abs(moa25 - 7.2722) < 1e-3 && std::abs(moa25 - moa_oracle(25.0)) < 1e-3 && worst_excess <= 1e-9,
         "1 MOA at 25 m = " + fmt(moa25) + " mm (7.2722 +- 0.001, trig oracle " + fmt(moa_oracle(25.0)) +
             "); residual within half a click over 1000 offsets: " + (worst_excess <= 1e-9 ? "yes" : "no"));

  return failures == 0 ? 0 : 1;
}
