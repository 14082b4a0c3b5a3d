#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "docsynth/error.hpp"
#include "docsynth/layout.hpp"
#include "docsynth/render.hpp"
#include "docsynth/subnets.hpp"
#include "test_support.hpp"

using namespace docsynth;
using testing_support::Bundle;

namespace {

const Bundle& mixture() {
  static const Bundle b("mixture");
  return b;
}
const Bundle& scientific() {
  static const Bundle b("scientific");
  return b;
}

TextStyle serif_style(double size) { return {0, FontStyle::Regular, size}; }

// Advance of a string summed glyph by glyph from the font tables, the oracle
// for line fitting.
double oracle_advance(const Font& f, double size, std::u32string_view s) {
  const double q = std::round(size * 64.0) / 64.0;
  double a = 0.0;
  for (const char32_t c : s) a += f.advance_width(f.glyph_index(c)) * q / f.units_per_em();
  return a;
}

// A scientific plan stripped to a bare single-column page.
DocumentPlan bare_plan() {
  const auto& b = scientific();
  DocumentPlan p = sample_document_plan(b.mixture, b.resources, 0, 1);
  p.title.reset();
  p.header.reset();
  p.footer.reset();
  p.body.clear();
  p.columns = 1;
  p.margin = 0.08;
  p.font_size_pt = 10;
  p.font_index = 0;
  return p;
}

}  // namespace

TEST(Category, NamesRoundTrip) {
  for (int i = 1; i <= kCategoryCount; ++i) {
    const auto c = static_cast<Category>(i);
    EXPECT_EQ(category_from_name(category_name(c)), c);
  }
  EXPECT_EQ(category_name(Category::TableCell), "table_cell");
  EXPECT_THROW(category_from_name("chart"), Error);
}

TEST(MeasureText, SingleTokenIsOneLine) {
  TextEngine te;
  const auto m = measure_text({U"hello"}, scientific().fonts[0], te, serif_style(20), 500, 24);
  ASSERT_EQ(m.lines.size(), 1u);
  EXPECT_EQ(m.lines[0], U"hello");
  EXPECT_FALSE(m.extent.empty());
}

TEST(MeasureText, EmptyTokenListHasZeroExtent) {
  TextEngine te;
  const auto m = measure_text({}, scientific().fonts[0], te, serif_style(20), 500, 24);
  EXPECT_TRUE(m.lines.empty());
  EXPECT_TRUE(m.extent.empty());
}

TEST(MeasureText, ExactFillDoesNotWrapOneMoreGlyphDoes) {
  TextEngine te;
  const auto& fonts = scientific().fonts[0];
  const Font& f = fonts.families[0].face(FontStyle::Regular);
  const std::vector<std::u32string> tokens = {U"alpha", U"beta", U"gamma"};
  const double width = oracle_advance(f, 16, U"alpha beta gamma");
  const auto fit = measure_text(tokens, fonts, te, serif_style(16), width, 20);
  EXPECT_EQ(fit.lines.size(), 1u);
  const auto plus = measure_text({U"alpha", U"beta", U"gammas"}, fonts, te, serif_style(16), width, 20);
  ASSERT_EQ(plus.lines.size(), 2u);
  EXPECT_EQ(plus.lines[1], U"gammas");
  EXPECT_EQ(plus.line_starts, (std::vector<std::size_t>{0, 2}));
}

TEST(MeasureText, GreedyBreaksMatchOracleProperty) {
  TextEngine te;
  const auto& b = scientific();
  const Font& f = b.fonts[0].families[0].face(FontStyle::Regular);
  RngStream rng(5, {2});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::u32string> tokens;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) tokens.push_back(decode_utf8(b.resources[0].vocabulary[rng() % b.resources[0].vocabulary.size()]));
    const double size = 10 + rng.uniform() * 14;
    const double width = 150 + rng.uniform() * 300;
    const auto m = measure_text(tokens, b.fonts[0], te, serif_style(size), width, 20);
    // Oracle: every line fits, and adding the next token would not.
    std::size_t next = 0;
    for (std::size_t l = 0; l < m.lines.size(); ++l) {
      EXPECT_EQ(m.line_starts[l], next);
      EXPECT_LE(oracle_advance(f, size, m.lines[l]), width + 1e-9);
      const auto words = std::count(m.lines[l].begin(), m.lines[l].end(), U' ') + 1;
      next += static_cast<std::size_t>(words);
      if (next < tokens.size())
        EXPECT_GT(oracle_advance(f, size, m.lines[l] + U" " + tokens[next]), width - 1e-9);
    }
    EXPECT_EQ(next, tokens.size());
  }
}

TEST(MeasureText, OverlongTokenIsForceBroken) {
  TextEngine te;
  const auto m = measure_text({U"abcdefghijklmnop"}, scientific().fonts[0], te, serif_style(20), 40, 24);
  EXPECT_GT(m.lines.size(), 1u);
  EXPECT_EQ(m.forced_breaks, 1);
  std::u32string joined;
  for (const auto& l : m.lines) joined += l;
  EXPECT_EQ(joined, U"abcdefghijklmnop");
}

TEST(MeasureText, FallsBackToAnotherFamily) {
  // A face set whose primary family lacks Cyrillic, the second has it.
  TextEngine te;
  FontSet fonts = scientific().fonts[0];
  ASSERT_GE(fonts.families.size(), 2u);
  const auto run = shape_run(fonts, te, serif_style(12), U"abc");
  EXPECT_EQ(run.segments.size(), 1u);
  try {
    shape_run(fonts, te, serif_style(12), U"中");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FontGlyphMissing);
  }
}

TEST(SplitWidths, RemainderGoesToLastColumn) {
  EXPECT_EQ(split_widths({0.5, 0.5}, 301), (std::vector<int>{150, 151}));
  EXPECT_EQ(split_widths({1.0}, 77), (std::vector<int>{77}));
  RngStream rng(3, {1});
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<double> f(static_cast<std::size_t>(n));
    double s = 0;
    for (auto& x : f) s += (x = rng.uniform_open());
    for (auto& x : f) x /= s;
    const int width = 10 + static_cast<int>(rng() % 1000);
    const auto w = split_widths(f, width);
    EXPECT_EQ(std::accumulate(w.begin(), w.end(), 0), width);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) EXPECT_EQ(w[i], static_cast<int>(std::floor(f[i] * width)));
  }
}

TEST(FitWidths, RaisesNarrowColumnsFromSlack) {
  EXPECT_EQ(fit_widths({100, 100}, {50, 50}), (std::vector<int>{100, 100}));
  EXPECT_EQ(fit_widths({150, 50}, {50, 80}), (std::vector<int>{120, 80}));
  EXPECT_EQ(fit_widths({100, 100}, {150, 150}), (std::vector<int>{100, 100}));
  EXPECT_EQ(fit_widths({190, 10}, {100, 300}), (std::vector<int>{50, 150}));
  RngStream rng(8, {8});
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    std::vector<int> w(n);
    std::vector<int> m(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = static_cast<int>(rng() % 300);
      m[i] = static_cast<int>(rng() % 120);
    }
    const auto f = fit_widths(w, m);
    const long long total = std::accumulate(w.begin(), w.end(), 0LL);
    const long long need = std::accumulate(m.begin(), m.end(), 0LL);
    EXPECT_EQ(std::accumulate(f.begin(), f.end(), 0LL), total);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(f[i], 0);
      if (need <= total) EXPECT_GE(f[i], m[i]);
      if (need <= total && w[i] >= m[i]) EXPECT_LE(f[i], w[i]);
    }
  }
}

namespace {

TablePlan simple_table(int rows, int cols) {
  TablePlan t;
  t.rows = rows;
  t.cols = cols;
  t.cell_widths.assign(static_cast<std::size_t>(cols), 1.0 / cols);
  t.col_align.assign(static_cast<std::size_t>(cols), Align::Left);
  t.cells.resize(static_cast<std::size_t>(rows * cols));
  t.h_pad = 0.5;
  t.v_pad = 0.25;
  return t;
}

}  // namespace

TEST(LayoutTable, OneByOneCellFillsTheFrame) {
  TextEngine te;
  auto t = simple_table(1, 1);
  const auto tl = layout_table(t, {{U"x"}}, 200, scientific().fonts[0], te, serif_style(20), 20);
  ASSERT_EQ(tl.cells.size(), 1u);
  EXPECT_EQ(tl.cells[0].box, tl.frame);
  EXPECT_EQ(tl.frame.w, 200);
  EXPECT_EQ(tl.frame.h, tl.line_height + 2 * tl.v_pad);
  EXPECT_EQ(tl.h_pad, 10);
}

TEST(LayoutTable, WrappedCellSetsRowHeight) {
  TextEngine te;
  auto t = simple_table(2, 2);
  const auto& fonts = scientific().fonts[0];
  std::vector<std::vector<std::u32string>> tokens = {
      {U"one"}, {U"several", U"words", U"that", U"must", U"wrap", U"here"}, {U"a"}, {U"b"}};
  const auto tl = layout_table(t, tokens, 240, fonts, te, serif_style(20), 20);
  const auto oracle = measure_text(tokens[1], fonts, te, serif_style(20), 120 - 2 * tl.h_pad, tl.line_height);
  ASSERT_GE(oracle.lines.size(), 2u);
  EXPECT_EQ(tl.row_heights[0], static_cast<int>(oracle.lines.size()) * tl.line_height + 2 * tl.v_pad);
  EXPECT_EQ(tl.cells[0].box.h, tl.row_heights[0]);
  EXPECT_EQ(tl.row_heights[1], tl.line_height + 2 * tl.v_pad);
}

TEST(LayoutTable, CellsTileTheFrameProperty) {
  TextEngine te;
  const auto& b = scientific();
  for (int i = 0; i < 60; ++i) {
    auto plan = sample_document_plan(b.mixture, b.resources, static_cast<std::uint64_t>(i), 99);
    for (const auto& e : plan.body) {
      const auto* t = std::get_if<TablePlan>(&e);
      if (!t) continue;
      std::vector<std::vector<std::u32string>> tokens;
      for (const auto& c : t->cells) {
        std::vector<std::u32string> w;
        for (const auto& l : c.lines)
          for (auto tok : l) w.push_back(decode_utf8(b.resources[0].vocabulary[tok]));
        tokens.push_back(w);
      }
      const auto tl = layout_table(*t, tokens, 400, b.fonts[0], te, serif_style(18), 18);
      // Oracle for forced breaks: a column can hold its widest word whenever
      // all the minimums fit the width.
      std::vector<double> widest(static_cast<std::size_t>(t->cols), 0.0);
      for (std::size_t k = 0; k < tokens.size(); ++k) {
        TextStyle st = serif_style(18 * t->font_scale);
        if (t->cells[k].role == CellRole::Header || t->cells[k].role == CellRole::Question) st.style = FontStyle::Bold;
        for (const auto& tok : tokens[k])
          widest[k % widest.size()] = std::max(widest[k % widest.size()], std::ceil(run_advance(b.fonts[0], te, st, tok)) + 2 * tl.h_pad);
      }
      if (std::accumulate(widest.begin(), widest.end(), 0.0) <= 400) EXPECT_EQ(tl.forced_breaks, 0);
      long long area = 0;
      for (const auto& c : tl.cells) {
        area += c.box.area();
        EXPECT_TRUE(tl.frame.contains(c.box));
      }
      EXPECT_EQ(area, tl.frame.area());
      for (std::size_t a = 0; a < tl.cells.size(); ++a)
        for (std::size_t c = a + 1; c < tl.cells.size(); ++c)
          EXPECT_TRUE(intersect(tl.cells[a].box, tl.cells[c].box).empty());
    }
  }
}

TEST(Compose, EmptyBodyIsOnePageWithNoBodyBoxes) {
  TextEngine te;
  const auto plan = bare_plan();
  const auto doc = compose(plan, scientific().context(0, te));
  EXPECT_EQ(doc.pages.size(), 1u);
  EXPECT_TRUE(doc.elements.empty());
  EXPECT_EQ(doc.pages[0].background, plan.background);
}

TEST(Compose, LongFlowPaginatesInOrder) {
  TextEngine te;
  auto plan = bare_plan();
  plan.section_style.border = BorderType::None;
  plan.section_style.back_color.reset();
  plan.section_style.font_scale = 1.0;
  plan.section_style.pre_space = 0.5;
  plan.section_style.post_space = 0.5;
  const auto& geo = scientific().mixture.templates[0].page;
  const double base = plan.font_size_pt * geo.dpi / 72.0;
  const int margin = static_cast<int>(std::floor(plan.margin * std::min(geo.width_px, geo.height_px) + 0.5));
  const double printable = geo.height_px - 2.0 * margin;
  // Oracle: each one-line section needs its line plus both spacings.
  const double block = std::floor(1.25 * base + 0.5) + 2 * std::floor(0.5 * base + 0.5);
  const int n = static_cast<int>(std::ceil(3 * printable / block)) + 1;
  for (int i = 0; i < n; ++i) plan.body.emplace_back(SectionPlan{{TokenLine{static_cast<std::uint32_t>(i % 50)}}});
  const auto doc = compose(plan, scientific().context(0, te));
  EXPECT_GE(doc.pages.size(), 3u);
  ASSERT_EQ(doc.elements.size(), static_cast<std::size_t>(n));
  for (std::size_t i = 1; i < doc.elements.size(); ++i) {
    EXPECT_GE(doc.elements[i].page, doc.elements[i - 1].page);
    EXPECT_EQ(doc.elements[i].plan_index, static_cast<int>(i));
  }
}

TEST(Compose, TwoColumnBodyBoxesStayInOneColumn) {
  TextEngine te;
  const auto& b = mixture();
  int checked = 0;
  for (std::uint64_t i = 0; i < 40; ++i) {
    auto plan = sample_document_plan(b.mixture, b.resources, i, 21);
    plan.columns = 2;
    const auto& geo = b.mixture.templates[plan.template_index].page;
    const double base = plan.font_size_pt * geo.dpi / 72.0;
    const int margin = static_cast<int>(std::floor(plan.margin * std::min(geo.width_px, geo.height_px) + 0.5));
    const int gap = static_cast<int>(std::floor(1.5 * base + 0.5));
    const int col_w = (geo.width_px - 2 * margin - gap) / 2;
    const auto doc = compose(plan, b.context(plan.template_index, te));
    for (const auto& e : doc.elements) {
      if (e.plan_index < 0) continue;
      int inside = 0;
      for (int c = 0; c < 2; ++c) {
        const int x0 = margin + c * (col_w + gap);
        inside += e.box.x >= x0 && e.box.right() <= x0 + col_w;
      }
      EXPECT_EQ(inside, 1) << category_name(e.category);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Compose, GeometricInvariantsProperty) {
  TextEngine te;
  Renderer renderer(te);
  const auto& b = mixture();
  for (std::uint64_t i = 0; i < 120; ++i) {
    const auto plan = sample_document_plan(b.mixture, b.resources, i, 4242);
    const auto doc = compose(plan, b.context(plan.template_index, te));
    const auto& geo = b.mixture.templates[plan.template_index].page;

    // Containment and positive size.
    for (const auto& e : doc.elements) {
      EXPECT_GT(e.box.w, 0);
      EXPECT_GT(e.box.h, 0);
      EXPECT_TRUE((IntRect{0, 0, geo.width_px, geo.height_px}).contains(e.box)) << i;
      EXPECT_LT(e.page, static_cast<int>(doc.pages.size()));
    }
    // Non-overlap of flow siblings (cells nest in their table).
    for (std::size_t a = 0; a < doc.elements.size(); ++a)
      for (std::size_t c = a + 1; c < doc.elements.size(); ++c) {
        const auto& x = doc.elements[a];
        const auto& y = doc.elements[c];
        if (x.page != y.page || x.category == Category::TableCell || y.category == Category::TableCell) continue;
        EXPECT_EQ(intersect(x.box, y.box).area(), 0)
            << i << ": " << category_name(x.category) << " vs " << category_name(y.category);
      }
    // Conservation: every body element has at least one box, cells exactly one each.
    std::set<int> seen;
    std::map<int, int> cells;
    for (const auto& e : doc.elements) {
      if (e.plan_index >= 0 && e.category != Category::Caption && e.category != Category::TableCell)
        seen.insert(e.plan_index);
      if (e.category == Category::TableCell) ++cells[e.plan_index];
    }
    EXPECT_EQ(seen.size(), plan.body.size());
    for (std::size_t k = 0; k < plan.body.size(); ++k)
      if (const auto* t = std::get_if<TablePlan>(&plan.body[k])) {
        EXPECT_EQ(cells[static_cast<int>(k)], t->rows * t->cols);
      }
    EXPECT_EQ(doc.elements.size(), static_cast<std::size_t>(std::count_if(doc.elements.begin(), doc.elements.end(),
                                                                          [](auto&) { return true; })));
    // Ink containment, element by element.
    InkAudit audit;
    renderer.render(doc, &audit);
    long long total = 0;
    long long inside = 0;
    for (std::size_t k = 0; k < audit.total.size(); ++k) {
      total += audit.total[k];
      inside += audit.inside[k];
    }
    EXPECT_GE(static_cast<double>(inside), 0.99 * static_cast<double>(total));
  }
}

TEST(Compose, IsDeterministic) {
  TextEngine a;
  TextEngine b;
  const auto& m = mixture();
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto plan = sample_document_plan(m.mixture, m.resources, i, 8);
    const auto d1 = compose(plan, m.context(plan.template_index, a));
    const auto d2 = compose(plan, m.context(plan.template_index, b));
    EXPECT_EQ(d1.elements, d2.elements);
    EXPECT_EQ(d1.placed.size(), d2.placed.size());
  }
}

TEST(Compose, OversizedFigureIsRejected) {
  TextEngine te;
  auto plan = bare_plan();
  FigurePlan f;
  f.charts.push_back({ChartType::Bar, 1, 3, {0.1, 0.2, 0.3}, 0});
  f.height_fraction = 1.5;
  plan.body.emplace_back(f);
  try {
    compose(plan, scientific().context(0, te));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ElementTooLargeForPage);
  }
}

TEST(Compose, FigureShrinksBeforeMoving) {
  TextEngine te;
  auto plan = bare_plan();
  FigurePlan f;
  f.charts.push_back({ChartType::Bar, 1, 3, {0.1, 0.2, 0.3}, 0});
  f.height_fraction = 0.97;
  f.width_fraction = 0.8;
  for (int i = 0; i < 5; ++i) plan.body.emplace_back(SectionPlan{{TokenLine{1}}});
  plan.body.emplace_back(f);
  const auto doc = compose(plan, scientific().context(0, te));
  ASSERT_EQ(doc.elements.size(), 6u);
  const auto& fig = doc.elements[5];
  EXPECT_EQ(fig.page, 0);
  const auto& geo = scientific().mixture.templates[0].page;
  const int margin = static_cast<int>(std::floor(0.08 * geo.width_px + 0.5));
  const int full_h = static_cast<int>(std::floor(0.97 * (geo.height_px - 2 * margin) + 0.5));
  EXPECT_LT(fig.box.h, full_h);
  EXPECT_GE(fig.box.h, static_cast<int>(0.75 * full_h));
}

TEST(Compose, HeaderAndFooterStayInTheirBands) {
  TextEngine te;
  const auto& b = scientific();
  int bands = 0;
  for (std::uint64_t i = 0; i < 30; ++i) {
    const auto plan = sample_document_plan(b.mixture, b.resources, i, 77);
    const auto doc = compose(plan, b.context(0, te));
    const auto& geo = b.mixture.templates[0].page;
    const int margin = static_cast<int>(std::floor(plan.margin * std::min(geo.width_px, geo.height_px) + 0.5));
    std::map<int, int> per_page;
    for (const auto& e : doc.elements) {
      if (e.category != Category::HeaderFooter) continue;
      ++bands;
      const bool top = e.box.bottom() <= margin;
      const bool bottom = e.box.y >= geo.height_px - margin;
      EXPECT_TRUE(top || bottom);
      ++per_page[e.page];
    }
    for (const auto& [page, n] : per_page) EXPECT_LE(n, 2);
  }
  EXPECT_GT(bands, 10);
}
