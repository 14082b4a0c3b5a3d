#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "docsynth/error.hpp"
#include "docsynth/image_io.hpp"
#include "docsynth/raster.hpp"
#include "docsynth/rng.hpp"
#include "test_support.hpp"

using namespace docsynth;

namespace {

double coverage_sum(const CoverageRasterizer& r) {
  const auto cov = r.coverage();
  return std::accumulate(cov.begin(), cov.end(), 0.0) / 255.0;
}

// Shoelace area of a polygon, the oracle for total coverage.
double polygon_area(const std::vector<PointF>& pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[(i + 1) % pts.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return std::abs(a) / 2.0;
}

}  // namespace

TEST(IntRect, IntersectAndUnite) {
  const IntRect a{0, 0, 10, 10};
  const IntRect b{5, 5, 10, 10};
  EXPECT_EQ(intersect(a, b), (IntRect{5, 5, 5, 5}));
  EXPECT_EQ(unite(a, b), (IntRect{0, 0, 15, 15}));
  EXPECT_TRUE(intersect(a, {20, 20, 5, 5}).empty());
  EXPECT_EQ(unite(IntRect{}, b), b);
  EXPECT_TRUE(a.contains({2, 2, 8, 8}));
  EXPECT_FALSE(a.contains({2, 2, 9, 8}));
}

TEST(CoverageRasterizer, PixelAlignedRectIsSolid) {
  CoverageRasterizer r(10, 10);
  r.add_path(Path::rect(2, 3, 4, 5));
  const auto cov = r.coverage();
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      const bool inside = x >= 2 && x < 6 && y >= 3 && y < 8;
      EXPECT_EQ(cov[y * 10 + x], inside ? 255 : 0) << x << "," << y;
    }
}

TEST(CoverageRasterizer, HalfPixelEdgesGiveHalfCoverage) {
  CoverageRasterizer r(6, 6);
  r.add_path(Path::rect(1.5, 1, 3, 4));
  const auto cov = r.coverage();
  EXPECT_EQ(cov[2 * 6 + 1], 128);
  EXPECT_EQ(cov[2 * 6 + 2], 255);
  EXPECT_EQ(cov[2 * 6 + 4], 128);
  EXPECT_EQ(cov[2 * 6 + 5], 0);
}

TEST(CoverageRasterizer, WindingDirectionDoesNotMatter) {
  CoverageRasterizer cw(8, 8);
  CoverageRasterizer ccw(8, 8);
  cw.add_path(Path::polygon({{1, 1}, {7, 1}, {7, 6}, {1, 6}}));
  ccw.add_path(Path::polygon({{1, 1}, {1, 6}, {7, 6}, {7, 1}}));
  EXPECT_EQ(cw.coverage(), ccw.coverage());
}

TEST(CoverageRasterizer, TotalCoverageMatchesPolygonAreaProperty) {
  RngStream rng(11, {1});
  for (int trial = 0; trial < 200; ++trial) {
    auto g = rng.child(static_cast<std::uint64_t>(trial));
    // Convex polygon: random radii at sorted angles around a centre inside
    // the raster.
    const int n = 3 + static_cast<int>(g() % 6);
    std::vector<double> angles(n);
    for (auto& a : angles) a = g.uniform() * 2.0 * 3.141592653589793;
    std::sort(angles.begin(), angles.end());
    const double radius = 2.0 + g.uniform() * 10.0;
    const PointF c{15 + g.uniform() * 2, 15 + g.uniform() * 2};
    std::vector<PointF> pts;
    for (const double a : angles) pts.push_back({c.x + radius * std::cos(a), c.y + radius * std::sin(a)});
    CoverageRasterizer r(32, 32);
    r.add_path(Path::polygon(pts));
    // Each pixel rounds to 1/255, so allow half a level per pixel touched.
    EXPECT_NEAR(coverage_sum(r), polygon_area(pts), 0.5 / 255.0 * 4 * radius * radius + 1e-6) << trial;
  }
}

TEST(CoverageRasterizer, ShapesOutsideTheRasterAreClipped) {
  CoverageRasterizer r(10, 10);
  r.add_path(Path::rect(-5, -5, 10, 10));
  EXPECT_NEAR(coverage_sum(r), 25.0, 1e-9);
  CoverageRasterizer right(10, 10);
  right.add_path(Path::rect(8, 0, 10, 10));
  EXPECT_NEAR(coverage_sum(right), 20.0, 1e-9);
}

TEST(CoverageRasterizer, QuadraticCurveAreaMatchesOracle) {
  // Region under a parabola y = x^2 / 10 between x = 0 and 10, closed along
  // y = 10. Area of the region above the curve is 10*10 - 1000/30.
  Path p;
  p.move_to({0, 0});
  p.quad_to({5, 0}, {10, 10});
  p.line_to({0, 10});
  CoverageRasterizer r(12, 12);
  r.add_path(p);
  EXPECT_NEAR(coverage_sum(r), 100.0 - 1000.0 / 30.0, 0.15);
}

TEST(Raster, BlendMaskRespectsClipAndOpacity) {
  Image img(4, 1, kWhite);
  const std::uint8_t alpha[4] = {255, 255, 255, 255};
  blend_mask(img, alpha, 4, 1, 0, 0, kBlack, {1, 0, 2, 1});
  EXPECT_EQ(img.at(0, 0), kWhite);
  EXPECT_EQ(img.at(1, 0), kBlack);
  EXPECT_EQ(img.at(2, 0), kBlack);
  EXPECT_EQ(img.at(3, 0), kWhite);
  Image half(1, 1, kWhite);
  blend_mask(half, alpha, 1, 1, 0, 0, kBlack, half.bounds(), 0.5);
  EXPECT_NEAR(half.at(0, 0).r, 127.5, 1.0);
}

TEST(Raster, StrokeRectDrawsInside) {
  Image img(10, 10, kWhite);
  stroke_rect(img, {2, 2, 6, 6}, 1, kBlack);
  EXPECT_EQ(img.at(2, 2), kBlack);
  EXPECT_EQ(img.at(7, 7), kBlack);
  EXPECT_EQ(img.at(4, 4), kWhite);
  EXPECT_EQ(img.at(8, 8), kWhite);
}

TEST(Raster, ScaledImageFillsTarget) {
  Image src(2, 2, Rgb{200, 0, 0});
  Image img(20, 20, kWhite);
  draw_image_scaled(img, src, {5, 5, 10, 8}, img.bounds());
  EXPECT_EQ(img.at(5, 5), (Rgb{200, 0, 0}));
  EXPECT_EQ(img.at(14, 12), (Rgb{200, 0, 0}));
  EXPECT_EQ(img.at(15, 12), kWhite);
  EXPECT_EQ(img.at(4, 5), kWhite);
}

TEST(ImageIo, PngRoundTripIsLossless) {
  testing_support::TempDir dir;
  Image img(17, 9, kWhite);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      img.set(x, y, Rgb{static_cast<std::uint8_t>(x * 15), static_cast<std::uint8_t>(y * 28), 77});
  const auto file = dir.path() / "a.png";
  write_image(file, img, ImageFormat::Png);
  EXPECT_EQ(read_image(file), img);
  EXPECT_EQ(encode_png(img), encode_png(img));
}

TEST(ImageIo, JpegRoundTripIsClose) {
  testing_support::TempDir dir;
  Image img(32, 32, Rgb{40, 120, 200});
  const auto file = dir.path() / "a.jpg";
  write_image(file, img, ImageFormat::Jpeg);
  const Image back = read_image(file);
  ASSERT_EQ(back.width, 32);
  ASSERT_EQ(back.height, 32);
  EXPECT_NEAR(back.at(16, 16).b, 200, 4);
}

TEST(ImageIo, GarbageIsDecodeError) {
  testing_support::TempDir dir;
  const auto file = dir.path() / "bad.png";
  std::ofstream(file) << "not an image";
  try {
    read_image(file);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ImageDecodeError);
  }
}
