#include <gtest/gtest.h>

#include "docsynth/error.hpp"
#include "docsynth/font.hpp"
#include "docsynth/templates.hpp"

using namespace docsynth;

namespace {

std::shared_ptr<const Font> serif() {
  static auto f = Font::load(resource_dir() / "fonts" / "DejaVuSerif.ttf");
  return f;
}

// Tight box of non-background pixels, the oracle for measured ink.
IntRect ink_box(const Image& img) {
  IntRect box;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (!(img.at(x, y) == kWhite)) box = unite(box, {x, y, 1, 1});
  return box;
}

}  // namespace

TEST(Font, ParsesMetrics) {
  const auto& f = *serif();
  EXPECT_EQ(f.units_per_em(), 2048);
  EXPECT_GT(f.ascender(), 0);
  EXPECT_LT(f.descender(), 0);
  EXPECT_GT(f.glyph_count(), 3000u);
}

TEST(Font, CmapCoversLatinCyrillicGreek) {
  const auto& f = *serif();
  for (const char32_t c : {U'A', U'z', U' ', U'Ж', U'я', U'α', U'Σ', U'±', U'≤'}) EXPECT_TRUE(f.has_glyph(c)) << static_cast<unsigned>(c);
  EXPECT_FALSE(f.has_glyph(U'中'));
  EXPECT_NE(f.glyph_index(U'a'), f.glyph_index(U'b'));
}

TEST(Font, OutlinesAreNonEmptyForLettersAndEmptyForSpace) {
  const auto& f = *serif();
  EXPECT_FALSE(f.outline(f.glyph_index(U'g')).empty());
  EXPECT_TRUE(f.outline(f.glyph_index(U' ')).empty());
  // Composite glyph (accented letter) flattens to more contours than the base.
  EXPECT_GT(f.outline(f.glyph_index(U'é')).verbs().size(), f.outline(f.glyph_index(U'e')).verbs().size());
}

TEST(Font, MissingFileIsResolutionFailure) {
  try {
    Font::load("/nonexistent/font.ttf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FontResolutionFailed);
  }
}

TEST(Font, DecodeUtf8) {
  EXPECT_EQ(decode_utf8("aЖ≤"), U"aЖ≤");
  EXPECT_EQ(decode_utf8("a\xff"), U"a�");
  EXPECT_EQ(decode_utf8("\xe2\x89"), U"�");
}

TEST(TextEngine, GlyphBitmapIsTight) {
  TextEngine te;
  const auto& f = *serif();
  const auto& bm = te.glyph(f, f.glyph_index(U'H'), 24.0);
  ASSERT_FALSE(bm.empty());
  bool top = false, bottom = false, left = false, right = false;
  for (int x = 0; x < bm.width; ++x) {
    top |= bm.alpha[x] != 0;
    bottom |= bm.alpha[(bm.height - 1) * bm.width + x] != 0;
  }
  for (int y = 0; y < bm.height; ++y) {
    left |= bm.alpha[y * bm.width] != 0;
    right |= bm.alpha[y * bm.width + bm.width - 1] != 0;
  }
  EXPECT_TRUE(top && bottom && left && right);
  // Cap height of DejaVu Serif is 0.729 em.
  EXPECT_NEAR(-bm.top, 0.729 * 24, 1.0);
}

TEST(TextEngine, MeasuredInkEqualsDrawnInkProperty) {
  TextEngine te;
  const auto& f = *serif();
  const std::vector<std::u32string> runs = {U"Hello, world", U"Жёлтый ящик", U"αβγ ≤ x_1 ± y", U"jQ|gy",
                                            U"  spaced  ", U"."};
  for (const double size : {9.0, 12.5, 17.3, 31.0}) {
    for (const auto& run : runs) {
      const auto m = te.measure(f, size, run);
      Image img(400, 100, kWhite);
      te.draw(img, f, size, run, 20, 60, kBlack, img.bounds());
      EXPECT_EQ(translate(m.ink, 20, 60), ink_box(img)) << size;
    }
  }
}

TEST(TextEngine, AdvanceIsAdditive) {
  TextEngine te;
  const auto& f = *serif();
  const double a = te.measure(f, 20.0, U"ab").advance;
  EXPECT_NEAR(a, te.advance(f, 20.0, U'a') + te.advance(f, 20.0, U'b'), 1e-9);
}

TEST(TextEngine, CacheQuantizesSize) {
  TextEngine te;
  const auto& f = *serif();
  te.measure(f, 12.0, U"a");
  te.measure(f, 12.0 + 1e-4, U"a");
  EXPECT_EQ(te.cache_size(), 1u);
  te.measure(f, 12.5, U"a");
  EXPECT_EQ(te.cache_size(), 2u);
}

TEST(TextEngine, MissingGlyphThrows) {
  TextEngine te;
  try {
    te.measure(*serif(), 12.0, U"ok 中");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FontGlyphMissing);
    EXPECT_NE(std::string(e.what()).find("U+4E2D"), std::string::npos);
  }
}

TEST(TextEngine, DrawClipsToRect) {
  TextEngine te;
  Image img(200, 60, kWhite);
  te.draw(img, *serif(), 30.0, U"WWWW", 10, 40, kBlack, {0, 0, 40, 60});
  const auto box = ink_box(img);
  EXPECT_LE(box.right(), 40);
  EXPECT_FALSE(box.empty());
}
