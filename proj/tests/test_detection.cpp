#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "zeroline/components.hpp"
#include "zeroline/detection.hpp"
#include "zeroline/synthgen.hpp"

using namespace zeroline;

namespace {

GrayImage template_with_holes(const std::vector<Point2>& centers, double r, std::uint64_t seed) {
  GrayImage img = zltest::default_template().image;
  Rng rng(seed);
  for (auto c : centers) detail::punch_hole(img, c, r, rng);
  return img;
}

std::size_t components_at_threshold(const GrayImage& img, const BlobParams& p) {
  const int t = blob_threshold(img, p.intensity_percentile);
  std::vector<std::uint8_t> mask(img.data().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = img.data()[i] <= t;
  return connected_components(mask, img.width(), img.height()).size();
}

nlohmann::json doc_with(nlohmann::json det) {
  return {{"image", "x.pgm"}, {"frame", "normalized"}, {"detections", nlohmann::json::array({det})}};
}

}  // namespace

TEST(Blobs, BlankTemplateHasNone) {
  EXPECT_TRUE(detect_blobs(zltest::default_template().image).empty());
  EXPECT_TRUE(detect_holes(zltest::default_template().image).empty());
}

TEST(Blobs, FourSeparatedHoles) {
  const std::vector<Point2> centers{{300.3, 310.7}, {480.5, 305.2}, {330.8, 470.1}, {500.0, 500.0}};
  const GrayImage img = template_with_holes(centers, 6.0, 1);
  for (const auto& dets : {detect_blobs(img), detect_holes(img)}) {
    ASSERT_EQ(dets.size(), 4u);
    for (auto c : centers) {
      double nearest = 1e9;
      for (const auto& d : dets) nearest = std::min(nearest, distance(d.bbox.center(), c));
      EXPECT_LE(nearest, 2.0);
    }
  }
}

TEST(Blobs, ThinScratchRejected) {
  GrayImage img = zltest::default_template().image;
  for (int y = 300; y < 302; ++y)
    for (int x = 300; x < 340; ++x) img.at(x, y) = 20;
  // Convex hull of a 2x40 pixel bar is the bar itself: 4*pi*80 / 84^2.
  const double expected = 4.0 * std::numbers::pi * 80.0 / (84.0 * 84.0);
  std::vector<int> px;
  for (int y = 300; y < 302; ++y)
    for (int x = 300; x < 340; ++x) px.push_back(y * img.width() + x);
  EXPECT_NEAR(detail::circularity(px, img.width()), expected, 1e-12);
  BlobParams p;
  p.min_circularity = 0.6;
  EXPECT_TRUE(detect_blobs(img, p).empty());
}

TEST(Blobs, DiscCircularityNearOne) {
  std::vector<int> px;
  const int w = 100;
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x)
      if ((x - 50) * (x - 50) + (y - 50) * (y - 50) <= 30 * 30) px.push_back(y * w + x);
  EXPECT_GT(detail::circularity(px, w), 0.95);
  EXPECT_LE(detail::circularity(px, w), 1.0);
}

TEST(Blobs, CountBoundedByComponentsAndInsideFrame) {
  const auto& t = zltest::default_template();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SequenceSpec spec;
    spec.seed = seed;
    spec.perspective_magnitude = 0.0;
    spec.noise_sigma = 0.0;
    const Sequence seq = generate_sequence(spec, t);
    for (const auto& img : seq.images) {
      const auto dets = detect_blobs(img);
      EXPECT_LE(dets.size(), components_at_threshold(img, {}));
      for (const auto& d : dets) {
        EXPECT_GE(d.bbox.x_min, 0.0);
        EXPECT_GE(d.bbox.y_min, 0.0);
        EXPECT_LE(d.bbox.x_max, t.canonical_size);
        EXPECT_LE(d.bbox.y_max, t.canonical_size);
      }
    }
  }
}

TEST(Blobs, OverlappingPairIsSplit) {
  // Two holes whose discs touch, among three isolated reference holes.
  const std::vector<Point2> centers{{300, 300}, {309, 302}, {480, 300}, {300, 480}, {480, 480}};
  const GrayImage img = template_with_holes(centers, 5.5, 4);
  EXPECT_EQ(detect_blobs(img).size(), 4u);
  const auto holes = detect_holes(img);
  ASSERT_EQ(holes.size(), 5u);
  for (auto c : centers) {
    double nearest = 1e9;
    for (const auto& d : holes) nearest = std::min(nearest, distance(d.bbox.center(), c));
    EXPECT_LE(nearest, 3.0);
  }
}

TEST(Blobs, SortedByConfidence) {
  const GrayImage img = template_with_holes({{300, 300}, {420, 420}, {500, 330}}, 6.0, 9);
  const auto dets = detect_blobs(img);
  for (std::size_t i = 1; i < dets.size(); ++i) EXPECT_GE(dets[i - 1].confidence, dets[i].confidence);
}

TEST(DetectionFile, EmptyList) {
  const nlohmann::json doc{{"image", "a.pgm"}, {"frame", "normalized"}, {"detections", nlohmann::json::array()}};
  EXPECT_TRUE(load_detections(doc).empty());
}

TEST(DetectionFile, PassThrough) {
  const auto dets = load_detections(doc_with({{"class", "bullet_hole"}, {"bbox", {1.5, 2.25, 10, 12}}, {"confidence", 0.75}}));
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].cls, DetectionClass::kBulletHole);
  EXPECT_EQ(dets[0].bbox.x_min, 1.5);
  EXPECT_EQ(dets[0].bbox.y_min, 2.25);
  EXPECT_EQ(dets[0].bbox.x_max, 10.0);
  EXPECT_EQ(dets[0].bbox.y_max, 12.0);
  EXPECT_EQ(dets[0].confidence, 0.75);
}

TEST(DetectionFile, BadConfidenceNamesField) {
  try {
    load_detections(doc_with({{"class", "bullet_hole"}, {"bbox", {1, 2, 10, 12}}, {"confidence", 1.7}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
    EXPECT_NE(std::string(e.what()).find("detections[0].confidence"), std::string::npos) << e.what();
  }
}

TEST(DetectionFile, OtherSchemaErrors) {
  EXPECT_THROW(load_detections(doc_with({{"class", "bird"}, {"bbox", {1, 2, 10, 12}}, {"confidence", 0.5}})), Error);
  EXPECT_THROW(load_detections(doc_with({{"class", "target"}, {"bbox", {10, 2, 1, 12}}, {"confidence", 0.5}})), Error);
  EXPECT_THROW(load_detections(doc_with({{"class", "target"}, {"bbox", {1, 2, 10}}, {"confidence", 0.5}})), Error);
  EXPECT_THROW(load_detections(nlohmann::json::array()), Error);
}

TEST(DetectionFile, RawFrameNeedsHomography) {
  nlohmann::json doc = doc_with({{"class", "bullet_hole"}, {"bbox", {1, 2, 10, 12}}, {"confidence", 0.5}});
  doc["frame"] = "raw";
  try {
    load_detections(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFrameMismatch);
  }
  const auto moved = load_detections(doc, Homography::translation(-1, -2));
  EXPECT_DOUBLE_EQ(moved[0].bbox.x_min, 0.0);
  EXPECT_DOUBLE_EQ(moved[0].bbox.y_max, 10.0);
}

TEST(DetectionFile, RoundTrip) {
  Rng rng(3);
  DetectionFile f;
  f.image = "iter_1.pgm";
  for (int i = 0; i < 25; ++i) {
    const double x = rng.uniform(0, 700), y = rng.uniform(0, 700);
    f.detections.push_back({{x, y, x + rng.uniform(1, 30), y + rng.uniform(1, 30)},
                            rng.uniform(),
                            i % 3 ? DetectionClass::kBulletHole : DetectionClass::kTarget});
  }
  const auto text = to_json(f).dump();
  EXPECT_EQ(load_detections(nlohmann::json::parse(text)), f.detections);
}

TEST(Nms, IdenticalBoxesKeepHigher) {
  const std::vector<Detection> d{{{0, 0, 10, 10}, 0.8, DetectionClass::kBulletHole}, {{0, 0, 10, 10}, 0.9, DetectionClass::kBulletHole}};
  const auto kept = nms(d, 0.5);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].confidence, 0.9);
}

TEST(Nms, DisjointBoxesSurvive) {
  const std::vector<Detection> d{{{0, 0, 10, 10}, 0.8, DetectionClass::kBulletHole}, {{20, 20, 30, 30}, 0.9, DetectionClass::kBulletHole}};
  EXPECT_EQ(nms(d, 0.5).size(), 2u);
}

TEST(Nms, ChainKeepsEnds) {
  // A-B and B-C overlap by half a box (IoU 1/3); A and C only touch.
  const Detection a{{0, 0, 10, 10}, 0.9, DetectionClass::kBulletHole};
  const Detection b{{5, 0, 15, 10}, 0.8, DetectionClass::kBulletHole};
  const Detection c{{10, 0, 20, 10}, 0.7, DetectionClass::kBulletHole};
  ASSERT_NEAR(iou(a.bbox, b.bbox), 1.0 / 3.0, 1e-12);
  ASSERT_NEAR(iou(b.bbox, c.bbox), 1.0 / 3.0, 1e-12);
  ASSERT_EQ(iou(a.bbox, c.bbox), 0.0);
  const auto kept = nms({c, a, b}, 0.3);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0], a);
  EXPECT_EQ(kept[1], c);
}

TEST(Nms, OutputIsAntichainPerClass) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Detection> d;
    for (int i = 0; i < 30; ++i) {
      const double x = rng.uniform(0, 60), y = rng.uniform(0, 60);
      d.push_back({{x, y, x + rng.uniform(5, 20), y + rng.uniform(5, 20)}, rng.uniform(),
                   rng.uniform() < 0.5 ? DetectionClass::kBulletHole : DetectionClass::kTarget});
    }
    const double thr = rng.uniform(0.1, 0.9);
    const auto kept = nms(d, thr);
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j)
        if (kept[i].cls == kept[j].cls) EXPECT_LT(iou(kept[i].bbox, kept[j].bbox), thr);
  }
}
