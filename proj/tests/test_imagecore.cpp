#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "support.hpp"
#include "zeroline/components.hpp"
#include "zeroline/image.hpp"
#include "zeroline/image_ops.hpp"
#include "zeroline/rng.hpp"

using namespace zeroline;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header, std::vector<std::uint8_t> raster) {
  std::vector<std::uint8_t> b(header.begin(), header.end());
  b.insert(b.end(), raster.begin(), raster.end());
  return b;
}

GrayImage random_image(Rng& rng, int w, int h) {
  GrayImage img(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return img;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kNumericalFailure;
}

}  // namespace

TEST(Pgm, DecodesTwoByTwo) {
  const GrayImage img = decode_pgm(bytes_of("P5 2 2 255 ", {0, 64, 128, 255}));
  ASSERT_EQ(img.width(), 2);
  ASSERT_EQ(img.height(), 2);
  EXPECT_EQ(img.at(0, 0), 0);
  EXPECT_EQ(img.at(1, 0), 64);
  EXPECT_EQ(img.at(0, 1), 128);
  EXPECT_EQ(img.at(1, 1), 255);
}

TEST(Pgm, DecodesSinglePixel) {
  const GrayImage img = decode_pgm(bytes_of("P5 1 1 255 ", {7}));
  EXPECT_EQ(img.width(), 1);
  EXPECT_EQ(img.at(0, 0), 7);
}

TEST(Pgm, HeaderCommentsAreSkipped) {
  const GrayImage img = decode_pgm(bytes_of("P5\n# made by hand\n1 1\n255\n", {9}));
  EXPECT_EQ(img.at(0, 0), 9);
}

TEST(Pgm, RejectsBadHeaders) {
  EXPECT_EQ(code_of([] { decode_pgm(bytes_of("P6 1 1 255 ", {1, 2, 3})); }), ErrorCode::kMalformedHeader);
  EXPECT_EQ(code_of([] { decode_pgm(bytes_of("P5 1 1 65535 ", {1, 2})); }), ErrorCode::kUnsupportedMaxval);
  EXPECT_EQ(code_of([] { decode_pgm(bytes_of("P5 2 2 255 ", {1, 2, 3})); }), ErrorCode::kTruncatedRaster);
  EXPECT_EQ(code_of([] { decode_pgm(bytes_of("P5 x 2 255 ", {})); }), ErrorCode::kMalformedHeader);
}

TEST(Pgm, MissingFileIsNotFound) {
  EXPECT_EQ(code_of([] { load_pgm("/nonexistent/zeroline/none.pgm"); }), ErrorCode::kNotFound);
}

TEST(Pgm, SizeIsHeaderPlusRaster) {
  const GrayImage img(2, 3, 17);
  const auto bytes = encode_pgm(img);
  const std::string header = "P5\n2 3\n255\n";
  EXPECT_EQ(bytes.size(), header.size() + 6);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<long>(header.size())), header);
}

TEST(Pgm, UnwritablePathIsIoFailure) {
  EXPECT_EQ(code_of([] { save_pgm(GrayImage(1, 1), "/nonexistent/zeroline/out.pgm"); }), ErrorCode::kIoFailure);
}

TEST(Pgm, RoundTripIsByteIdentical) {
  zltest::TempDir dir("pgm");
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = static_cast<int>(rng.uniform_int(1, 40)), h = static_cast<int>(rng.uniform_int(1, 40));
    const GrayImage img = random_image(rng, w, h);
    save_pgm(img, dir / "a.pgm");
    const auto first = zltest::slurp(dir / "a.pgm");
    const GrayImage back = load_pgm(dir / "a.pgm");
    ASSERT_EQ(back, img);
    save_pgm(back, dir / "b.pgm");
    ASSERT_EQ(zltest::slurp(dir / "b.pgm"), first);
  }
}

TEST(Bilinear, IntegerCoordinatesReadPixels) {
  Rng rng(3);
  const GrayImage img = random_image(rng, 5, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) EXPECT_DOUBLE_EQ(bilinear_sample(img, {double(x), double(y)}), img.at(x, y));
}

TEST(Bilinear, MidpointIsAverage) {
  GrayImage img(2, 1);
  img.at(1, 0) = 100;
  EXPECT_DOUBLE_EQ(bilinear_sample(img, {0.5, 0.0}), 50.0);
}

TEST(Bilinear, OutsideIsOutOfBounds) {
  const GrayImage img(4, 4);
  EXPECT_EQ(code_of([&] { bilinear_sample(img, {4 - 0.5, 0}); }), ErrorCode::kOutOfBounds);
  EXPECT_EQ(code_of([&] { bilinear_sample(img, {-0.01, 0}); }), ErrorCode::kOutOfBounds);
}

TEST(Bilinear, ConstantImageGivesConstant) {
  const GrayImage img(9, 7, 123);
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    EXPECT_DOUBLE_EQ(bilinear_sample(img, {rng.uniform(0, 8), rng.uniform(0, 6)}), 123.0);
  }
}

TEST(Warp, IdentityReproducesSource) {
  Rng rng(8);
  const GrayImage img = random_image(rng, 31, 17);
  EXPECT_EQ(warp_perspective(img, Homography(), 31, 17), img);
}

TEST(Warp, TranslationShiftsColumns) {
  Rng rng(9);
  const GrayImage img = random_image(rng, 12, 6);
  const GrayImage out = warp_perspective(img, Homography::translation(1, 0), 12, 6);
  for (int y = 0; y < 6; ++y) {
    EXPECT_EQ(out.at(0, y), 0);
    for (int u = 1; u < 12; ++u) EXPECT_EQ(out.at(u, y), img.at(u - 1, y));
  }
}

TEST(Warp, SingularHomographyRejected) {
  EXPECT_EQ(code_of([] { warp_perspective(GrayImage(4, 4), Homography::from_array({1, 2, 3, 2, 4, 6, 0, 0, 1}), 4, 4); }),
            ErrorCode::kSingularHomography);
}

TEST(Warp, ForwardThenInverseLosesLittle) {
  // Smooth image so interpolation loss is bounded.
  GrayImage img(120, 120);
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 120; ++x) img.at(x, y) = to_pixel(128 + 80 * std::sin(x / 9.0) * std::cos(y / 13.0));
  const auto h = Homography::from_array({1.02, 0.05, 3.0, -0.03, 0.98, 2.0, 1e-4, -5e-5, 1.0});
  const GrayImage there = warp_perspective(img, h, 120, 120);
  const GrayImage back = warp_perspective(there, h.inverse(), 120, 120);
  double err = 0.0;
  int n = 0;
  for (int y = 20; y < 100; ++y) {
    for (int x = 20; x < 100; ++x) {
      err += std::abs(int(back.at(x, y)) - int(img.at(x, y)));
      ++n;
    }
  }
  EXPECT_LE(err / n, 2.0);
}

TEST(Annotate, EmptyListIsUnchanged) {
  Rng rng(1);
  const GrayImage img = random_image(rng, 10, 10);
  EXPECT_EQ(annotate(img, {}), img);
}

TEST(Annotate, OneBoxChangesExactlyItsPerimeter) {
  const GrayImage img(10, 10, 255);
  const std::vector<LabeledBox> boxes{{{2, 2, 5, 5}, BoxLabel::kNewHole}};
  const GrayImage out = annotate(img, boxes);
  int changed = 0;
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      const bool inside = x >= 2 && x <= 5 && y >= 2 && y <= 5;
      const bool on_edge = inside && (x == 2 || x == 5 || y == 2 || y == 5);
      EXPECT_EQ(out.at(x, y) != 255, on_edge) << x << "," << y;
      changed += out.at(x, y) != 255;
    }
  }
  EXPECT_EQ(changed, 12);
}

TEST(Annotate, LabelsUseDistinctLevels) {
  const GrayImage img(10, 10, 255);
  const std::vector<LabeledBox> boxes{{{1, 1, 3, 3}, BoxLabel::kNewHole}, {{6, 6, 8, 8}, BoxLabel::kPriorHole}};
  const GrayImage out = annotate(img, boxes);
  EXPECT_EQ(out.at(1, 1), AnnotateStyle{}.new_hole);
  EXPECT_EQ(out.at(6, 6), AnnotateStyle{}.prior_hole);
  EXPECT_NE(AnnotateStyle{}.new_hole, AnnotateStyle{}.prior_hole);
}

TEST(Annotate, OversizedBoxIsClipped) {
  const GrayImage img(8, 8, 255);
  const std::vector<LabeledBox> boxes{{{-20, 3, 40, 6}, BoxLabel::kNewHole}};
  const GrayImage out = annotate(img, boxes);
  for (int x = 0; x < 8; ++x) {
    EXPECT_NE(out.at(x, 3), 255);
    EXPECT_NE(out.at(x, 6), 255);
    EXPECT_EQ(out.at(x, 4), 255);
  }
}

TEST(Components, EightConnectivityAndOrder) {
  // Two diagonal pixels join; a separate block stays apart.
  const int w = 6, h = 4;
  std::vector<std::uint8_t> m(w * h, 0);
  m[0 * w + 0] = m[1 * w + 1] = 1;
  m[2 * w + 4] = m[2 * w + 5] = m[3 * w + 4] = 1;
  const auto comps = connected_components(m, w, h);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].area(), 2u);
  EXPECT_EQ(comps[1].area(), 3u);
  EXPECT_EQ(comps[1].x_min, 4);
  EXPECT_EQ(comps[1].y_max, 3);
  const BBox b = comps[1].bbox();
  EXPECT_DOUBLE_EQ(b.x_min, 3.5);
  EXPECT_DOUBLE_EQ(b.x_max, 5.5);
}

TEST(Luma, Bt601Weights) {
  EXPECT_EQ(luma_bt601(255, 255, 255), 255);
  EXPECT_EQ(luma_bt601(0, 0, 0), 0);
  EXPECT_EQ(luma_bt601(255, 0, 0), static_cast<int>(std::lround(0.299 * 255)));
  EXPECT_EQ(luma_bt601(0, 255, 0), static_cast<int>(std::lround(0.587 * 255)));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformIntStaysInRangeAndCoversIt) {
  Rng rng(1);
  std::array<int, 5> hist{};
  for (int i = 0; i < 5000; ++i) {
    const auto v = rng.uniform_int(3, 7);
    ASSERT_GE(v, 3);
    ASSERT_LE(v, 7);
    ++hist[static_cast<std::size_t>(v - 3)];
  }
  for (int n : hist) EXPECT_NEAR(n, 1000, 150);
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  double s = 0, s2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal(10.0, 2.0);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 10.0, 0.05);
  EXPECT_NEAR(std::sqrt(var), 2.0, 0.05);
}
