#include <gtest/gtest.h>

#include <cmath>

#include "docsynth/defects.hpp"
#include "docsynth/subnets.hpp"
#include "test_support.hpp"

using namespace docsynth;
using testing_support::Bundle;

namespace {

const Bundle& scientific() {
  static const Bundle b("scientific");
  return b;
}

const TemplateSpec& spec() { return scientific().mixture.templates[0]; }

std::map<std::string, Realized> realize_defects(const TemplateSpec& s, RngStream rng) {
  std::map<std::string, Realized> out;
  std::uint64_t i = 0;
  for (const auto& [id, d] : s.params) {
    if (id.rfind("defects.", 0) != 0) continue;
    auto r = rng.child(i++);
    out.emplace(id, realize(d, r));
  }
  return out;
}

void set_presence(std::map<std::string, Realized>& realized, double p) {
  for (auto& [id, r] : realized)
    if (id.size() > 8 && id.ends_with(".present")) r.params = {p};
}

}  // namespace

TEST(SampleDefects, ZeroPresenceGivesEmptyPlan) {
  auto realized = realize_defects(spec(), RngStream(1, {0}));
  set_presence(realized, 0.0);
  for (std::uint64_t i = 0; i < 200; ++i) EXPECT_TRUE(sample_defect_plan(spec(), realized, RngStream(2, {i})).ops.empty());
}

TEST(SampleDefects, ForcedWatermarkCarriesTheFixedText) {
  TemplateSpec s = spec();
  s.watermark_texts = {"DRAFT"};
  auto realized = realize_defects(s, RngStream(1, {0}));
  set_presence(realized, 0.0);
  realized.at("defects.watermark.present").params = {1.0};
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto plan = sample_defect_plan(s, realized, RngStream(3, {i}));
    ASSERT_EQ(plan.ops.size(), 1u);
    const auto* w = std::get_if<Watermark>(&plan.ops[0]);
    ASSERT_NE(w, nullptr);
    EXPECT_EQ(w->text, "DRAFT");
  }
}

TEST(SampleDefects, PresenceFrequencyMatchesBetaMean) {
  TemplateSpec s = spec();
  s.params.at("defects.dark_corner.present").params = BetaParams{3.0, 7.0};
  int hits = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const RngStream root(11, {static_cast<std::uint64_t>(i)});
    const auto realized = realize_defects(s, root.child(0));
    const auto plan = sample_defect_plan(s, realized, root.child(1));
    for (const auto& op : plan.ops) hits += kind_of(op) == DefectKind::DarkCorner;
  }
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.3, 0.02);
}

TEST(SampleDefects, PlansAreOrderedAndBoundedProperty) {
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const RngStream root(17, {i});
    auto realized = realize_defects(spec(), root.child(0));
    if (i % 2 == 0) set_presence(realized, 1.0);
    const auto plan = sample_defect_plan(spec(), realized, root.child(1));
    if (i % 2 == 0) EXPECT_EQ(plan.ops.size(), 6u);
    for (std::size_t k = 1; k < plan.ops.size(); ++k) EXPECT_LT(kind_of(plan.ops[k - 1]), kind_of(plan.ops[k]));
    for (const auto& op : plan.ops) {
      if (const auto* w = std::get_if<Watermark>(&op)) {
        EXPECT_GE(w->opacity, 0.0);
        EXPECT_LE(w->opacity, 1.0);
        EXPECT_LE(std::abs(w->angle), 180.0);
      } else if (const auto* o = std::get_if<Occlusion>(&op)) {
        EXPECT_LE(o->width * o->height, kMaxOcclusionArea + 1e-12);
        EXPECT_GE(o->x, 0.0);
        EXPECT_LE(o->x + o->width, 1.0 + 1e-12);
        EXPECT_LE(o->y + o->height, 1.0 + 1e-12);
      } else if (const auto* b = std::get_if<Blur>(&op)) {
        EXPECT_GE(b->radius, 0.0);
      } else if (const auto* t = std::get_if<BleedThrough>(&op)) {
        EXPECT_GE(t->opacity, 0.0);
        EXPECT_LE(t->opacity, 1.0);
      }
    }
    EXPECT_EQ(plan, sample_defect_plan(spec(), realized, root.child(1)));
  }
}

namespace {

std::vector<Image> text_pages(int count) {
  std::vector<Image> pages;
  for (int p = 0; p < count; ++p) {
    Image img(120, 90, {250, 248, 240});
    fill_rect(img, {10 + 20 * p, 10, 30, 8}, {20, 20, 20});
    fill_rect(img, {10, 40, 60, 5}, {150, 20, 20});
    pages.push_back(img);
  }
  return pages;
}

}  // namespace

TEST(ApplyDefects, EmptyPlanIsIdentity) {
  auto pages = text_pages(3);
  const auto before = pages;
  apply_defects(pages, {}, scientific().fonts[0]);
  EXPECT_EQ(pages, before);
}

TEST(ApplyDefects, ZeroBlurIsIdentity) {
  auto pages = text_pages(2);
  const auto before = pages;
  apply_defects(pages, {{Blur{0.0}}}, scientific().fonts[0]);
  EXPECT_EQ(pages, before);
}

TEST(ApplyDefects, BlurKeepsFlatImagesAndSpreadsPoints) {
  Image flat(40, 30, {90, 160, 30});
  const Image copy = flat;
  gaussian_blur(flat, 1.7);
  EXPECT_EQ(flat, copy);

  Image dot(41, 41, kBlack);
  dot.set(20, 20, kWhite);
  gaussian_blur(dot, 1.0);
  // Oracle: the centre keeps the squared normalised 1-D centre weight.
  double sum = 0;
  for (int i = -3; i <= 3; ++i) sum += std::exp(-0.5 * i * i);
  const double centre = 255.0 / (sum * sum);
  EXPECT_NEAR(dot.at(20, 20).r, centre, 1.0);
  EXPECT_EQ(dot.at(19, 20), dot.at(21, 20));
  EXPECT_EQ(dot.at(20, 19), dot.at(19, 20));
  EXPECT_EQ(dot.at(0, 0), kBlack);
}

TEST(ApplyDefects, WatermarkCentreIsHalfBlend) {
  std::vector<Image> pages{Image(400, 400, kWhite)};
  Watermark w;
  w.text = "\xE2\x96\x88";  // full block
  w.angle = 30;
  w.opacity = 0.5;
  w.size = 0.4;
  w.color = {20, 100, 180};
  apply_defects(pages, {{w}}, scientific().fonts[0]);
  const Rgb c = pages[0].at(200, 200);
  EXPECT_NEAR(c.r, 0.5 * 20 + 0.5 * 255, 1.0);
  EXPECT_NEAR(c.g, 0.5 * 100 + 0.5 * 255, 1.0);
  EXPECT_NEAR(c.b, 0.5 * 180 + 0.5 * 255, 1.0);
  EXPECT_EQ(pages[0].at(2, 2), kWhite);
}

TEST(ApplyDefects, WatermarkTextLeavesTranslucentInk) {
  std::vector<Image> pages{Image(600, 400, kWhite)};
  Watermark w;
  w.text = "DRAFT";
  w.angle = -40;
  w.opacity = 0.2;
  w.size = 0.15;
  w.color = kBlack;
  apply_defects(pages, {{w}}, scientific().fonts[0]);
  int changed = 0;
  int darkest = 255;
  for (int y = 0; y < 400; ++y)
    for (int x = 0; x < 600; ++x) {
      const int v = pages[0].at(x, y).r;
      changed += v != 255;
      darkest = std::min(darkest, v);
    }
  EXPECT_GT(changed, 2000);
  EXPECT_NEAR(darkest, 255 * 0.8, 1.0);
}

TEST(ApplyDefects, BleedThroughIsAttenuatedAndMirrored) {
  auto pages = text_pages(1);
  const Rgb paper{250, 248, 240};
  pages[0] = Image(120, 90, paper);
  fill_rect(pages[0], {5, 30, 20, 20}, kBlack);
  const auto before = pages;
  apply_defects(pages, {{BleedThrough{0.2}}}, scientific().fonts[0]);
  // The mirrored block lands at x in [95, 115).
  const Rgb ghost = pages[0].at(105, 40);
  const int delta = std::max({paper.r - ghost.r, paper.g - ghost.g, paper.b - ghost.b});
  const int unattenuated = std::max({paper.r - 0, paper.g - 0, paper.b - 0});
  EXPECT_GT(delta, 0);
  EXPECT_LT(delta, unattenuated);
  EXPECT_EQ(pages[0].at(60, 80), paper);
  EXPECT_EQ(pages[0].at(15, 40), kBlack);
}

TEST(ApplyDefects, BleedThroughPairsSheets) {
  std::vector<Image> pages{Image(100, 50, kWhite), Image(100, 50, kWhite)};
  fill_rect(pages[1], {0, 10, 20, 20}, kBlack);
  apply_defects(pages, {{BleedThrough{0.3}}}, scientific().fonts[0]);
  EXPECT_LT(pages[0].at(90, 20).r, 255);
  EXPECT_EQ(pages[0].at(10, 20), kWhite);
}

TEST(ApplyDefects, ShadowDarkensTowardItsEdge) {
  std::vector<Image> pages{Image(200, 100, kWhite)};
  apply_defects(pages, {{Shadow{Side::Right, 0.2, 0.5}}}, scientific().fonts[0]);
  EXPECT_EQ(pages[0].at(150, 50), kWhite);
  int prev = 256;
  for (int x = 160; x < 200; ++x) {
    const int v = pages[0].at(x, 50).r;
    EXPECT_LE(v, prev);
    prev = v;
  }
  EXPECT_NEAR(pages[0].at(199, 50).r, 255 * (1 - 0.5 * std::pow(1 - 0.5 / 40, 2)), 1.0);
}

TEST(ApplyDefects, DarkCornerOnlyTouchesItsCorner) {
  std::vector<Image> pages{Image(200, 100, kWhite)};
  apply_defects(pages, {{DarkCorner{Corner::BottomLeft, 0.5, 0.4}}}, scientific().fonts[0]);
  EXPECT_LT(pages[0].at(0, 99).r, 200);
  EXPECT_LT(pages[0].at(0, 99).b, pages[0].at(0, 99).r);
  EXPECT_EQ(pages[0].at(199, 0), kWhite);
  EXPECT_EQ(pages[0].at(60, 99), kWhite);
}

TEST(ApplyDefects, OcclusionFillsItsRectangle) {
  std::vector<Image> pages{Image(100, 100, kWhite)};
  apply_defects(pages, {{Occlusion{0.1, 0.2, 0.3, 0.25, {90, 90, 90}}}}, scientific().fonts[0]);
  long long n = 0;
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x) {
      const bool in = x >= 10 && x < 40 && y >= 20 && y < 45;
      EXPECT_EQ(pages[0].at(x, y), (in ? Rgb{90, 90, 90} : kWhite));
      n += in;
    }
  EXPECT_EQ(n, 750);
}

TEST(ApplyDefects, SampledPlansAreDeterministic) {
  const auto& b = scientific();
  for (std::uint64_t i = 0; i < 8; ++i) {
    const RngStream root(5, {i});
    auto realized = realize_defects(spec(), root.child(0));
    set_presence(realized, 1.0);
    const auto plan = sample_defect_plan(spec(), realized, root.child(1));
    auto a = text_pages(2);
    auto c = text_pages(2);
    apply_defects(a, plan, b.fonts[0]);
    apply_defects(c, plan, b.fonts[0]);
    EXPECT_EQ(a, c);
    EXPECT_NE(a, text_pages(2));
  }
}
