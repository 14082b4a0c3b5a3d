#include "docsynth/layout.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "docsynth/error.hpp"

namespace docsynth {

namespace {

constexpr std::string_view kCategoryNames[] = {"title",         "section",   "table",  "table_cell", "figure",
                                               "header_footer", "paragraph", "bullet", "equation",   "caption"};

int round_px(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::string hex_code_point(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(c));
  return buf;
}

const Font& pick_font(const FontSet& fonts, const TextStyle& style, char32_t c) {
  const Font& primary = fonts.families.at(style.family).face(style.style);
  if (primary.has_glyph(c)) return primary;
  for (const auto& family : fonts.families) {
    const Font& f = family.face(style.style);
    if (f.has_glyph(c)) return f;
  }
  throw Error(ErrorCode::FontGlyphMissing, hex_code_point(c) + " is not covered by any font of the template");
}

std::vector<std::u32string> split_words(std::u32string_view text) {
  std::vector<std::u32string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == U' ') ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != U' ') ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

struct Breaks {
  std::vector<std::size_t> starts;
  std::vector<std::u32string> lines;
  int forced = 0;
};

// Greedy first-fit; `max_lines` stops early once that many lines are complete.
Breaks break_lines(const std::vector<std::u32string>& tokens, const FontSet& fonts, TextEngine& engine,
                   const TextStyle& style, double max_width, std::size_t max_lines = SIZE_MAX) {
  Breaks out;
  const double space = run_advance(fonts, engine, style, U" ");
  std::u32string cur;
  double cur_adv = 0.0;
  std::size_t cur_start = 0;
  auto push = [&] {
    out.lines.push_back(std::move(cur));
    out.starts.push_back(cur_start);
    cur.clear();
    cur_adv = 0.0;
  };
  for (std::size_t i = 0; i < tokens.size() && out.lines.size() < max_lines; ++i) {
    const auto& tok = tokens[i];
    const double adv = run_advance(fonts, engine, style, tok);
    if (!cur.empty() && cur_adv + space + adv <= max_width) {
      cur += U' ';
      cur += tok;
      cur_adv += space + adv;
      continue;
    }
    if (!cur.empty()) push();
    if (out.lines.size() >= max_lines) break;
    cur_start = i;
    if (adv <= max_width) {
      cur = tok;
      cur_adv = adv;
      continue;
    }
    // Wider than a whole line: break between glyphs, at least one glyph per
    // piece.
    ++out.forced;
    for (const char32_t c : tok) {
      const double ca = run_advance(fonts, engine, style, std::u32string_view(&c, 1));
      if (!cur.empty() && cur_adv + ca > max_width) {
        push();
        cur_start = i;
        if (out.lines.size() >= max_lines) break;
      }
      cur += c;
      cur_adv += ca;
    }
  }
  if (!cur.empty() && out.lines.size() < max_lines) push();
  return out;
}

DrawOp translated(DrawOp op, int dx, int dy) {
  std::visit(
      [&](auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, TextOp>) {
          o.x += dx;
          o.baseline += dy;
          o.clip = translate(o.clip, dx, dy);
        } else if constexpr (std::is_same_v<T, RectOp>) {
          o.rect = translate(o.rect, dx, dy);
        } else if constexpr (std::is_same_v<T, ShapeOp>) {
          o.path.transform({1, 0, static_cast<double>(dx), 0, 1, static_cast<double>(dy)});
          o.clip = translate(o.clip, dx, dy);
        } else {
          o.frame = translate(o.frame, dx, dy);
        }
      },
      op);
  return op;
}

// Sub-element of a unit op.
constexpr int kMain = -1;
constexpr int kCaption = -2;

struct LocalOp {
  int sub = kMain;
  IntRect ink;
  DrawOp op;
};

// An indivisible vertical piece of a block, in coordinates relative to its
// top-left corner at the column's left edge.
struct Unit {
  int height = 0;
  std::vector<LocalOp> ops;
  // Cell tiles (table rows only): cell index and tile.
  std::vector<std::pair<int, IntRect>> cells;

  int ink_top() const {
    int t = 0;
    for (const auto& o : ops)
      if (!o.ink.empty()) t = std::min(t, o.ink.y);
    return t;
  }
  int ink_bottom() const {
    int b = height;
    for (const auto& o : ops)
      if (!o.ink.empty()) b = std::max(b, o.ink.bottom());
    return b;
  }
  void append(const Unit& other, int dy) {
    for (const auto& o : other.ops) ops.push_back({o.sub, translate(o.ink, 0, dy), translated(o.op, 0, dy)});
    height = std::max(height, dy + other.height);
  }
};

class Composer {
 public:
  Composer(const DocumentPlan& plan, const LayoutContext& ctx) : plan_(plan), ctx_(ctx) {
    const auto& page = ctx.spec->page;
    width_ = page.width_px;
    height_ = page.height_px;
    base_ = plan.font_size_pt * page.dpi / 72.0;
    margin_ = round_px(plan.margin * std::min(width_, height_));
    cols_ = std::max(1, plan.columns);
    gap_ = round_px(1.5 * base_);
    printable_w_ = width_ - 2 * margin_;
    col_w_ = (printable_w_ - gap_ * (cols_ - 1)) / cols_;
    bottom_ = height_ - margin_;
    body_style_ = {plan.font_index, FontStyle::Regular, base_};
    first_top_ = margin_;
  }

  ComposedDocument run() {
    new_page();
    if (plan_.title) place_title(*plan_.title);
    first_top_ = floor_ = ink_floor_ = y_;
    for (std::size_t i = 0; i < plan_.body.size(); ++i) {
      plan_index_ = static_cast<int>(i);
      post_ = 0;
      std::visit([&](const auto& e) { place(e); }, plan_.body[i]);
      close_fragment();
      y_ = std::max(y_, ink_floor_) + post_;
      floor_ = ink_floor_ = y_;
    }
    plan_index_ = -1;
    if (plan_.header) place_band(*plan_.header, 0);
    if (plan_.footer) place_band(*plan_.footer, height_ - margin_);
    return std::move(doc_);
  }

 private:
  // --- text helpers ---------------------------------------------------------------

  std::u32string token_text(std::uint32_t token) const {
    return decode_utf8(ctx_.resources->vocabulary.at(token));
  }
  std::vector<std::u32string> token_words(const TokenLine& line) const {
    std::vector<std::u32string> words;
    words.reserve(line.size());
    for (const auto t : line) words.push_back(token_text(t));
    return words;
  }
  const Font& primary(const TextStyle& s) const { return ctx_.fonts->families.at(s.family).face(s.style); }

  // One line of text as ops, aligned within [0, avail) and baseline-centred
  // in a slot of height line_h.
  Unit text_unit(std::u32string_view text, const TextStyle& style, Rgb color, Align align, int avail, int line_h,
                 int sub = kMain) {
    Unit u;
    u.height = line_h;
    if (text.empty()) return u;
    const auto run = shape_run(*ctx_.fonts, *ctx_.text, style, text);
    int x = 0;
    if (align == Align::Center) x = round_px((avail - run.advance) / 2.0);
    if (align == Align::Right) x = round_px(avail - run.advance);
    x = std::max(0, x);
    const Font& f = primary(style);
    const double asc = ascent_px(f, style.size_px);
    const double desc = descent_px(f, style.size_px);
    const int baseline = round_px(asc + std::max(0.0, (line_h - asc - desc) / 2.0));
    // Clip rows extend to the line slot's neighbours so descenders survive;
    // the column band is applied at placement.
    const IntRect clip{0, -line_h, avail, 3 * line_h};
    for (const auto& seg : run.segments) {
      TextOp op{seg.font, style.size_px, seg.text, x + seg.x, baseline, color, clip};
      const IntRect ink = intersect(translate(ctx_.text->measure(*seg.font, style.size_px, seg.text).ink,
                                              x + seg.x, baseline),
                                    clip);
      u.ops.push_back({sub, ink, std::move(op)});
    }
    return u;
  }

  std::vector<std::u32string> wrap_lines(const std::vector<std::u32string>& words, const TextStyle& style,
                                         double max_width) {
    auto b = break_lines(words, *ctx_.fonts, *ctx_.text, style, max_width);
    doc_.forced_breaks += b.forced;
    return std::move(b.lines);
  }

  // --- pages, columns, fragments ------------------------------------------------

  void new_page() {
    doc_.pages.push_back({width_, height_, plan_.background});
    page_ = static_cast<int>(doc_.pages.size()) - 1;
    col_ = 0;
    y_ = floor_ = ink_floor_ = page_ == 0 ? first_top_ : margin_;
    at_top_ = true;
  }

  int column_x() const { return margin_ + col_ * (col_w_ + gap_); }
  int column_top() const { return page_ == 0 ? first_top_ : margin_; }
  IntRect column_band() const { return {column_x(), column_top(), col_w_, bottom_ - column_top()}; }

  void next_column() {
    close_fragment();
    if (++col_ >= cols_) {
      new_page();
    } else {
      y_ = floor_ = ink_floor_ = column_top();
      at_top_ = true;
    }
  }

  int add_element(Category c, int parent) {
    LayoutElement e;
    e.category = c;
    e.page = page_;
    e.element_id = static_cast<int>(doc_.elements.size());
    e.parent_id = parent;
    e.plan_index = plan_index_;
    doc_.elements.push_back(e);
    return e.element_id;
  }

  void close_fragment() {
    if (on_close_) on_close_();
    main_ = -1;
  }

  int main_element() {
    if (main_ < 0) main_ = add_element(main_category_, -1);
    return main_;
  }

  void emit(int owner, IntRect ink, DrawOp op) {
    auto& e = doc_.elements.at(static_cast<std::size_t>(owner));
    ink = intersect(ink, {0, 0, width_, height_});
    if (!ink.empty()) e.box = unite(e.box, ink);
    doc_.placed.push_back({page_, owner, ink, std::move(op)});
  }

  int unit_top(const Unit& u, int pre) const {
    const int y = at_top_ ? y_ : y_ + pre;
    return std::max(y, floor_ - u.ink_top());
  }

  bool fits(const Unit& u, int pre) const { return unit_top(u, pre) + u.ink_bottom() <= bottom_; }

  void require_fit(const Unit& u, int pre) {
    if (fits(u, pre)) return;
    if (!at_top_) {
      next_column();
      if (fits(u, pre)) return;
    }
    throw Error(ErrorCode::ElementTooLargeForPage,
                "a " + std::string(category_name(main_category_)) + " piece of height " +
                    std::to_string(u.ink_bottom() - u.ink_top()) + " px exceeds the column height " +
                    std::to_string(bottom_ - column_top()) + " px");
  }

  // Places a unit that is known to fit at the cursor: below the previous
  // element's ink, with lines of one element stacked at their nominal
  // height. Returns its top y.
  int put(const Unit& u, int pre, int caption_owner = -1) {
    const int top = unit_top(u, pre);
    const int x = column_x();
    const IntRect band = column_band();
    for (const auto& o : u.ops) {
      DrawOp op = translated(o.op, x, top);
      if (auto* t = std::get_if<TextOp>(&op)) t->clip = intersect(t->clip, band);
      if (auto* s = std::get_if<ShapeOp>(&op)) s->clip = intersect(s->clip, band);
      const IntRect ink = intersect(translate(o.ink, x, top), band);
      int owner;
      if (o.sub == kCaption) {
        if (caption_ < 0) caption_ = add_element(Category::Caption, caption_owner);
        owner = caption_;
      } else if (o.sub >= 0) {
        owner = cell_ids_.at(static_cast<std::size_t>(o.sub));
      } else {
        owner = main_element();
      }
      emit(owner, ink, std::move(op));
    }
    y_ = top + u.height;
    ink_floor_ = std::max(ink_floor_, top + u.ink_bottom());
    at_top_ = false;
    return top;
  }

  void place_unit(const Unit& u, int pre) {
    require_fit(u, pre);
    put(u, pre);
  }

  // --- headings ---------------------------------------------------------------------

  Unit heading_unit(const std::vector<TokenLine>& token_lines, const HeadingStyle& hs, int avail) {
    const TextStyle style{plan_.font_index, hs.font_style, hs.font_scale * base_};
    const int line_h = round_px(1.25 * style.size_px);
    const bool deco = hs.back_color.has_value() || hs.border != BorderType::None;
    const int pad = deco ? round_px(0.35 * style.size_px) : 0;
    const int t = std::max(1, round_px(style.size_px / 14.0));
    const int bar = std::max(2, round_px(style.size_px / 5.0));
    int left = pad;
    int right = pad;
    if (hs.border == BorderType::Box) {
      left += t;
      right += t;
    }
    if (hs.border == BorderType::LeftBar) left += bar;
    const int text_w = std::max(1, avail - left - right);

    std::vector<std::u32string> lines;
    for (const auto& tl : token_lines)
      for (auto& l : wrap_lines(token_words(tl), style, text_w)) lines.push_back(std::move(l));

    Unit u;
    const int text_h = static_cast<int>(lines.size()) * line_h;
    const int frame_h = text_h + 2 * pad + (hs.border == BorderType::Underline ? t : 0);
    u.height = frame_h;
    auto rect = [&](IntRect r, Rgb c) { u.ops.push_back({kMain, r, RectOp{r, c}}); };
    if (hs.back_color) rect({0, 0, avail, frame_h}, *hs.back_color);
    switch (hs.border) {
      case BorderType::None: break;
      case BorderType::Underline: rect({0, frame_h - t, avail, t}, hs.border_color); break;
      case BorderType::Box:
        rect({0, 0, avail, t}, hs.border_color);
        rect({0, frame_h - t, avail, t}, hs.border_color);
        rect({0, 0, t, frame_h}, hs.border_color);
        rect({avail - t, 0, t, frame_h}, hs.border_color);
        break;
      case BorderType::LeftBar: rect({0, 0, bar, frame_h}, hs.border_color); break;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      Unit line = text_unit(lines[i], style, hs.fore_color, hs.align, text_w, line_h);
      for (auto& o : line.ops) {
        o.op = translated(o.op, left, pad + static_cast<int>(i) * line_h);
        o.ink = translate(o.ink, left, pad + static_cast<int>(i) * line_h);
        if (auto* op = std::get_if<TextOp>(&o.op)) {
          // Decorated headings keep their text inside the frame.
          if (deco) op->clip = intersect(op->clip, {0, 0, avail, frame_h});
        }
        if (deco) o.ink = intersect(o.ink, {0, 0, avail, frame_h});
        u.ops.push_back(std::move(o));
      }
    }
    return u;
  }

  void place_title(const TitlePlan& title) {
    main_category_ = Category::Title;
    const Unit u = heading_unit(title.lines, title.style, printable_w_);
    const int pre = round_px(title.style.pre_space * base_);
    const int top = margin_ + pre + std::max(0, -u.ink_top());
    if (top + u.ink_bottom() > bottom_)
      throw Error(ErrorCode::ElementTooLargeForPage, "title does not fit the page");
    const int id = add_element(Category::Title, -1);
    const IntRect area{margin_, margin_, printable_w_, bottom_ - margin_};
    for (const auto& o : u.ops) {
      DrawOp op = translated(o.op, margin_, top);
      if (auto* t = std::get_if<TextOp>(&op)) t->clip = intersect(t->clip, area);
      emit(id, intersect(translate(o.ink, margin_, top), area), std::move(op));
    }
    y_ = top + u.ink_bottom() + round_px(title.style.post_space * base_);
  }

  // --- body elements ----------------------------------------------------------------

  void place(const SectionPlan& s) {
    main_category_ = Category::Section;
    const auto& hs = plan_.section_style;
    const Unit u = heading_unit(s.lines, hs, col_w_);
    place_unit(u, round_px(hs.pre_space * base_));
    post_ = round_px(hs.post_space * base_);
  }

  void place(const ParagraphPlan& p) {
    main_category_ = Category::Paragraph;
    const auto& sentences = ctx_.resources->sentences;
    const int line_h = std::max(1, round_px(p.line_spacing * base_));
    const double space = run_advance(*ctx_.fonts, *ctx_.text, body_style_, U" ");
    // Words of the sentences in order, cycling until there is clearly more
    // text than the lines can hold.
    std::vector<std::u32string> words;
    double total = 0.0;
    const double needed = (p.line_count + 1) * static_cast<double>(col_w_);
    for (std::size_t k = 0; total < needed && !p.sentences.empty() && k < 64 * p.sentences.size(); ++k) {
      for (auto& w : split_words(decode_utf8(sentences.at(p.sentences[k % p.sentences.size()])))) {
        total += run_advance(*ctx_.fonts, *ctx_.text, body_style_, w) + space;
        words.push_back(std::move(w));
      }
    }
    auto full = break_lines(words, *ctx_.fonts, *ctx_.text, body_style_, col_w_,
                            static_cast<std::size_t>(p.line_count));
    doc_.forced_breaks += full.forced;
    if (full.lines.empty()) return;
    std::vector<std::u32string> lines(full.lines.begin(), full.lines.end() - 1);
    // The last line stops at its fill fraction of the column.
    std::vector<std::u32string> tail(words.begin() + static_cast<std::ptrdiff_t>(full.starts.back()), words.end());
    auto last = break_lines(tail, *ctx_.fonts, *ctx_.text, body_style_,
                            std::max(1.0, p.last_line_fill * col_w_), 1);
    lines.push_back(last.lines.empty() ? full.lines.back() : last.lines.front());

    for (std::size_t i = 0; i < lines.size(); ++i)
      place_unit(text_unit(lines[i], body_style_, plan_.text_color, Align::Left, col_w_, line_h), 0);
    post_ = round_px(p.block_spacing * base_);
  }

  static std::u32string marker_text(BulletType type, std::size_t i) {
    switch (type) {
      case BulletType::Dash: return U"–";
      case BulletType::Number: return decode_utf8(std::to_string(i + 1) + ".");
      case BulletType::Letter: return std::u32string(1, static_cast<char32_t>(U'a' + i % 26)) + U".";
      default: return {};
    }
  }

  void place(const BulletPlan& b) {
    main_category_ = Category::Bullet;
    const int line_h = std::max(1, round_px(b.line_spacing * base_));
    const double size = base_;
    const int offset = std::min(round_px(b.offset * base_), col_w_ / 4);
    double marker_w = 0.8 * size;
    if (b.type == BulletType::Number || b.type == BulletType::Letter || b.type == BulletType::Dash)
      for (std::size_t i = 0; i < b.items.size(); ++i)
        marker_w = std::max(marker_w, run_advance(*ctx_.fonts, *ctx_.text, body_style_, marker_text(b.type, i)));
    const int text_x = offset + round_px(marker_w + 0.4 * size);
    const int text_w = std::max(1, col_w_ - text_x);
    const int item_gap = round_px(0.2 * size);
    const Font& f = primary(body_style_);

    for (std::size_t i = 0; i < b.items.size(); ++i) {
      const auto words = split_words(decode_utf8(ctx_.resources->sentences.at(b.items[i])));
      const auto lines = wrap_lines(words, body_style_, text_w);
      for (std::size_t l = 0; l < lines.size(); ++l) {
        Unit line = text_unit(lines[l], body_style_, plan_.text_color, Align::Left, text_w, line_h);
        Unit u;
        const int dy = (l == 0 && i > 0) ? item_gap : 0;
        u.height = line_h + dy;
        for (auto& o : line.ops) {
          o.op = translated(o.op, text_x, dy);
          o.ink = translate(o.ink, text_x, dy);
          u.ops.push_back(std::move(o));
        }
        if (l == 0) add_marker(u, b.type, i, offset, dy, line_h, f);
        place_unit(u, 0);
      }
    }
    post_ = round_px(b.block_spacing * base_);
  }

  void add_marker(Unit& u, BulletType type, std::size_t i, int x, int dy, int line_h, const Font& f) {
    const double size = base_;
    const double asc = ascent_px(f, size);
    const double desc = descent_px(f, size);
    const double baseline = dy + std::floor(asc + std::max(0.0, (line_h - asc - desc) / 2.0) + 0.5);
    // Marker centred on the x-height (about half the cap height).
    const double cy = baseline - 0.3 * size;
    switch (type) {
      case BulletType::Disc: {
        const double r = 0.17 * size;
        Path p = Path::ellipse({x + r, cy}, r, r);
        const IntRect ink{x, static_cast<int>(std::floor(cy - r)), static_cast<int>(std::ceil(2 * r)) + 1,
                          static_cast<int>(std::ceil(2 * r)) + 2};
        u.ops.push_back({kMain, ink, ShapeOp{std::move(p), plan_.text_color, ink}});
        break;
      }
      case BulletType::Square: {
        const int s = std::max(2, round_px(0.3 * size));
        const IntRect r{x, round_px(cy - s / 2.0), s, s};
        u.ops.push_back({kMain, r, RectOp{r, plan_.text_color}});
        break;
      }
      default: {
        Unit m = text_unit(marker_text(type, i), body_style_, plan_.text_color, Align::Left, col_w_, line_h);
        for (auto& o : m.ops) {
          o.op = translated(o.op, x, dy);
          o.ink = translate(o.ink, x, dy);
          u.ops.push_back(std::move(o));
        }
      }
    }
  }

  void place(const EquationPlan& e) {
    main_category_ = Category::Equation;
    const double size = base_;
    const double script = 0.7 * size;
    const int gap = round_px(e.spacing * base_);
    const int line_h = round_px(1.9 * size);
    const Font& f = primary(body_style_);
    const int baseline = round_px(0.45 * size + ascent_px(f, size));

    struct Piece {
      std::u32string text;
      TextStyle style;
      int dy;
      double adv;
    };
    std::vector<std::vector<Piece>> lines(1);
    double cur = 0.0;
    for (const auto& g : e.groups) {
      Piece p;
      p.text = decode_utf8(g.text);
      p.style = body_style_;
      p.style.style = FontStyle::Italic;
      p.dy = 0;
      if (g.level != ScriptLevel::Baseline) {
        p.style.size_px = script;
        p.dy = g.level == ScriptLevel::Superscript ? -round_px(0.45 * size) : round_px(0.25 * size);
      }
      p.adv = run_advance(*ctx_.fonts, *ctx_.text, p.style, p.text);
      const double need = (lines.back().empty() ? 0.0 : gap) + p.adv;
      if (!lines.back().empty() && cur + need > col_w_) {
        lines.emplace_back();
        cur = 0.0;
      }
      cur += (lines.back().empty() ? 0.0 : gap) + p.adv;
      lines.back().push_back(std::move(p));
    }

    Unit u;
    u.height = static_cast<int>(lines.size()) * line_h;
    const IntRect clip{0, -line_h, col_w_, u.height + 2 * line_h};
    for (std::size_t l = 0; l < lines.size(); ++l) {
      double w = 0.0;
      for (std::size_t k = 0; k < lines[l].size(); ++k) w += (k ? gap : 0) + lines[l][k].adv;
      double pen = std::max(0.0, (col_w_ - w) / 2.0);
      for (const auto& p : lines[l]) {
        const auto run = shape_run(*ctx_.fonts, *ctx_.text, p.style, p.text);
        const int x = round_px(pen);
        const int bl = static_cast<int>(l) * line_h + baseline + p.dy;
        for (const auto& seg : run.segments) {
          const IntRect ink = intersect(
              translate(ctx_.text->measure(*seg.font, p.style.size_px, seg.text).ink, x + seg.x, bl), clip);
          u.ops.push_back({kMain, ink, TextOp{seg.font, p.style.size_px, seg.text, x + seg.x, bl,
                                              plan_.text_color, clip}});
        }
        pen += p.adv + gap;
      }
    }
    place_unit(u, round_px(0.5 * e.block_spacing * base_));
    post_ = round_px(e.block_spacing * base_);
  }

  // Caption lines wrapped to `width`, as one unit of caption ops offset by x.
  Unit caption_unit(const CaptionPlan& c, int x, int width) {
    const TextStyle style{plan_.font_index, FontStyle::Regular, c.font_scale * base_};
    const int line_h = round_px(1.25 * style.size_px);
    Unit u;
    std::vector<std::u32string> lines;
    for (const auto& tl : c.lines)
      for (auto& l : wrap_lines(token_words(tl), style, width)) lines.push_back(std::move(l));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      Unit line = text_unit(lines[i], style, plan_.text_color, Align::Left, width, line_h, kCaption);
      u.append(line, static_cast<int>(i) * line_h);
    }
    for (auto& o : u.ops) {
      o.op = translated(o.op, x, 0);
      o.ink = translate(o.ink, x, 0);
    }
    u.height = static_cast<int>(lines.size()) * line_h;
    return u;
  }

  void place(const FigurePlan& fig) {
    main_category_ = Category::Figure;
    const int pre = round_px(fig.pre_space * base_);
    const int gap = round_px(0.4 * base_);
    const int printable_h = height_ - 2 * margin_;
    const int full_w = std::max(32, round_px(fig.width_fraction * col_w_));
    const int full_h = std::max(32, round_px(fig.height_fraction * printable_h));

    auto build = [&](double scale) {
      const int w = std::max(32, round_px(full_w * scale));
      const int h = std::max(32, round_px(full_h * scale));
      const int x = (col_w_ - w) / 2;
      Unit u;
      int y = 0;
      if (fig.caption && fig.caption->position == CaptionPosition::Above) {
        Unit c = caption_unit(*fig.caption, x, w);
        u.append(c, 0);
        y = c.ink_bottom() + gap;
      }
      const IntRect frame{x, y, w, h};
      if (fig.source == FigureSource::LibraryImage) {
        u.ops.push_back({kMain, frame, ImageOp{ctx_.resources->image_root / fig.image, frame}});
      } else {
        u.ops.push_back({kMain, frame, ChartOp{fig.charts, frame, ctx_.spec->palettes.chart, plan_.text_color}});
      }
      u.height = y + h;
      if (fig.caption && fig.caption->position == CaptionPosition::Below) {
        Unit c = caption_unit(*fig.caption, x, w);
        u.append(c, u.height + gap - std::min(0, c.ink_top()));
      }
      return u;
    };

    // Shrink up to 25% to stay in the current column, else move on.
    auto try_here = [&]() -> std::optional<Unit> {
      for (double s = 1.0; s >= 0.75 - 1e-9; s -= 0.05) {
        Unit u = build(s);
        if (fits(u, pre)) return u;
      }
      return std::nullopt;
    };
    auto u = try_here();
    if (!u && !at_top_) {
      next_column();
      u = try_here();
    }
    if (!u) throw Error(ErrorCode::ElementTooLargeForPage, "figure does not fit an empty column at 75% size");
    caption_ = -1;
    put(*u, pre, -1);
    // The caption belongs to the figure placed with it.
    if (caption_ >= 0) doc_.elements[static_cast<std::size_t>(caption_)].parent_id = main_;
    caption_ = -1;
    post_ = round_px(fig.post_space * base_);
  }

  void place(const TablePlan& t) {
    main_category_ = Category::Table;
    const int pre = round_px(t.pre_space * base_);
    int width = std::clamp(round_px(t.width_fraction * col_w_), t.cols, col_w_);

    std::vector<std::vector<std::u32string>> tokens;
    tokens.reserve(t.cells.size());
    for (const auto& cell : t.cells) {
      std::vector<std::u32string> words;
      if ((cell.role == CellRole::Question || cell.role == CellRole::Answer) && cell.qa_ref >= 0) {
        const auto& qa = ctx_.resources->qa_pairs.at(static_cast<std::size_t>(cell.qa_ref));
        words = split_words(decode_utf8(cell.role == CellRole::Question ? qa.first : qa.second));
      } else {
        for (const auto& line : cell.lines)
          for (auto& w : token_words(line)) words.push_back(std::move(w));
      }
      tokens.push_back(std::move(words));
    }
    TableLayout tl = layout_table(t, tokens, width, *ctx_.fonts, *ctx_.text, body_style_, base_);
    // A narrow table whose words do not fit even at the reduced font takes
    // the full column before resorting to mid-word breaks.
    if (tl.forced_breaks > 0 && width < col_w_) {
      width = col_w_;
      tl = layout_table(t, tokens, width, *ctx_.fonts, *ctx_.text, body_style_, base_);
    }
    int x = 0;
    if (t.align == Align::Center) x = (col_w_ - width) / 2;
    if (t.align == Align::Right) x = col_w_ - width;
    doc_.forced_breaks += tl.forced_breaks;
    const TextStyle cell_style{plan_.font_index, FontStyle::Regular, tl.font_size};

    int first_fragment = -1;
    if (t.caption && t.caption->position == CaptionPosition::Above) {
      caption_ = -1;
      place_unit(caption_unit(*t.caption, x, width), pre);
      y_ += round_px(0.3 * base_);
    }

    // Rows of the current fragment: (row index, absolute top).
    std::vector<std::pair<int, int>> frag_rows;
    on_close_ = [&] {
      if (frag_rows.empty() || main_ < 0) return;
      emit_table_rules(t, tl, frag_rows, column_x() + x);
      if (first_fragment < 0) first_fragment = main_;
      frag_rows.clear();
    };

    for (int r = 0; r < t.rows; ++r) {
      Unit u;
      u.height = tl.row_heights[static_cast<std::size_t>(r)];
      for (int c = 0; c < t.cols; ++c) {
        const auto& cb = tl.cells[static_cast<std::size_t>(r * t.cols + c)];
        const auto& plan_cell = t.cell(r, c);
        TextStyle style = cell_style;
        if (plan_cell.role == CellRole::Header || plan_cell.role == CellRole::Question) style.style = FontStyle::Bold;
        const Align align = (plan_cell.role == CellRole::Question || plan_cell.role == CellRole::Answer)
                                ? Align::Left
                                : t.col_align[static_cast<std::size_t>(c)];
        const IntRect tile{x + cb.box.x, 0, cb.box.w, u.height};
        const int inner_w = std::max(1, cb.box.w - 2 * tl.h_pad);
        const int sub = r * t.cols + c;
        for (std::size_t l = 0; l < cb.lines.size(); ++l) {
          Unit line = text_unit(cb.lines[l], style, plan_.text_color, align, inner_w, tl.line_height, sub);
          const int dx = tile.x + tl.h_pad;
          const int dy = tl.v_pad + static_cast<int>(l) * tl.line_height;
          for (auto& o : line.ops) {
            o.op = translated(o.op, dx, dy);
            if (auto* op = std::get_if<TextOp>(&o.op)) op->clip = intersect(op->clip, tile);
            o.ink = intersect(translate(o.ink, dx, dy), tile);
            u.ops.push_back(std::move(o));
          }
        }
        u.cells.push_back({sub, tile});
      }
      // Rows never split; a row taller than a whole column loses the lines
      // that do not fit.
      if (!fits(u, 0) && !at_top_) next_column();
      if (!fits(u, 0)) {
        const int room = bottom_ - y_;
        u.height = room;
        std::erase_if(u.ops, [&](const LocalOp& o) { return o.ink.bottom() > room; });
        for (auto& [sub, tile] : u.cells) tile.h = room;
        tl.row_heights[static_cast<std::size_t>(r)] = room;
      }
      cell_ids_.assign(t.cells.size(), -1);
      const int table_id = main_element();
      const int top = unit_top(u, 0);
      for (const auto& [sub, tile] : u.cells) {
        const int id = add_element(Category::TableCell, table_id);
        cell_ids_[static_cast<std::size_t>(sub)] = id;
        auto& e = doc_.elements[static_cast<std::size_t>(id)];
        e.box = translate(tile, column_x(), top);
        doc_.elements[static_cast<std::size_t>(table_id)].box =
            unite(doc_.elements[static_cast<std::size_t>(table_id)].box, e.box);
      }
      put(u, 0);
      frag_rows.push_back({r, top});
    }
    close_fragment();
    on_close_ = nullptr;
    if (t.caption && t.caption->position == CaptionPosition::Above) {
      if (caption_ >= 0) doc_.elements[static_cast<std::size_t>(caption_)].parent_id = first_fragment;
    }
    if (t.caption && t.caption->position == CaptionPosition::Below) {
      const int owner = last_table_fragment();
      y_ += round_px(0.3 * base_);
      caption_ = -1;
      Unit c = caption_unit(*t.caption, x, width);
      require_fit(c, 0);
      put(c, 0, owner);
    }
    caption_ = -1;
    post_ = round_px(t.post_space * base_);
  }

  int last_table_fragment() const {
    for (auto it = doc_.elements.rbegin(); it != doc_.elements.rend(); ++it)
      if (it->category == Category::Table) return it->element_id;
    return -1;
  }

  void emit_table_rules(const TablePlan& t, const TableLayout& tl, const std::vector<std::pair<int, int>>& rows,
                        int x0) {
    const int table_id = main_;
    const int rule = tl.rule;
    const int top = rows.front().second;
    const auto& last = rows.back();
    const int bottom = last.second + tl.row_heights[static_cast<std::size_t>(last.first)];
    const int width = tl.frame.w;
    const Rgb color = plan_.text_color;
    auto hline = [&](int y) {
      const int yy = std::clamp(y - rule / 2, top, bottom - rule);
      const IntRect r{x0, yy, width, rule};
      emit(table_id, r, RectOp{r, color});
    };
    auto vline = [&](int x) {
      const int xx = std::clamp(x - rule / 2, x0, x0 + width - rule);
      const IntRect r{xx, top, rule, bottom - top};
      emit(table_id, r, RectOp{r, color});
    };
    std::vector<int> col_x{x0};
    for (const int w : tl.col_widths) col_x.push_back(col_x.back() + w);

    switch (t.borders) {
      case TableBorders::None: break;
      case TableBorders::Rows:
        hline(top);
        for (std::size_t i = 1; i < rows.size(); ++i) hline(rows[i].second);
        hline(bottom);
        break;
      case TableBorders::Columns:
        for (const int cx : col_x) vline(cx);
        break;
      case TableBorders::Header:
        hline(top);
        if (t.header_row && rows.front().first == 0 && rows.size() > 1) hline(rows[1].second);
        hline(bottom);
        break;
      case TableBorders::Grid:
        hline(top);
        for (std::size_t i = 1; i < rows.size(); ++i) hline(rows[i].second);
        hline(bottom);
        for (const int cx : col_x) vline(cx);
        break;
      case TableBorders::Cells:
        for (const auto& [r, y] : rows) {
          const int h = tl.row_heights[static_cast<std::size_t>(r)];
          for (std::size_t c = 0; c + 1 < col_x.size(); ++c) {
            const IntRect cell{col_x[c] + 1, y + 1, col_x[c + 1] - col_x[c] - 2, h - 2};
            if (cell.w <= 2 * rule || cell.h <= 2 * rule) continue;
            for (const IntRect& r2 : {IntRect{cell.x, cell.y, cell.w, rule}, IntRect{cell.x, cell.bottom() - rule, cell.w, rule},
                                      IntRect{cell.x, cell.y, rule, cell.h}, IntRect{cell.right() - rule, cell.y, rule, cell.h}})
              emit(table_id, r2, RectOp{r2, color});
          }
        }
        break;
    }
  }

  // --- header / footer ----------------------------------------------------------

  void place_band(const HeaderPlan& h, int band_top) {
    const TextStyle style{plan_.font_index, h.font_style, h.font_scale * base_};
    const Font& f = primary(style);
    const double asc = ascent_px(f, style.size_px);
    const double desc = descent_px(f, style.size_px);
    const int baseline_off = round_px((margin_ + asc - desc) / 2.0);
    const int slots = std::max(1, h.columns);
    const auto widths = split_widths(std::vector<double>(static_cast<std::size_t>(slots), 1.0 / slots), printable_w_);
    for (int p = 0; p < static_cast<int>(doc_.pages.size()); ++p) {
      int id = -1;
      int x = margin_;
      for (int s = 0; s < slots; ++s) {
        const int w = widths[static_cast<std::size_t>(s)];
        const IntRect clip{x, band_top, w, margin_};
        std::vector<std::u32string> words;
        switch (h.content.at(static_cast<std::size_t>(s))) {
          case HeaderContent::LogoText: words = token_words(h.logo); break;
          case HeaderContent::PageNumber: words = {decode_utf8(std::to_string(p + 1))}; break;
          case HeaderContent::RunningTitle: words = token_words(h.running_title); break;
          case HeaderContent::Empty: break;
        }
        // Drop trailing words that do not fit the slot.
        std::u32string text;
        while (!words.empty()) {
          text.clear();
          for (std::size_t k = 0; k < words.size(); ++k) text += (k ? U" " : U"") + words[k];
          if (words.size() == 1 || run_advance(*ctx_.fonts, *ctx_.text, style, text) <= w) break;
          words.pop_back();
        }
        if (!text.empty()) {
          const auto run = shape_run(*ctx_.fonts, *ctx_.text, style, text);
          const Align align = h.align.at(static_cast<std::size_t>(s));
          int tx = 0;
          if (align == Align::Center) tx = round_px((w - run.advance) / 2.0);
          if (align == Align::Right) tx = round_px(w - run.advance);
          tx = x + std::max(0, tx);
          const int bl = band_top + baseline_off;
          for (const auto& seg : run.segments) {
            const IntRect ink =
                intersect(translate(ctx_.text->measure(*seg.font, style.size_px, seg.text).ink, tx + seg.x, bl), clip);
            if (ink.empty()) continue;
            if (id < 0) {
              const int saved = page_;
              page_ = p;
              id = add_element(Category::HeaderFooter, -1);
              page_ = saved;
            }
            doc_.elements[static_cast<std::size_t>(id)].box = unite(doc_.elements[static_cast<std::size_t>(id)].box, ink);
            doc_.placed.push_back({p, id, ink, TextOp{seg.font, style.size_px, seg.text, tx + seg.x, bl, h.color, clip}});
          }
        }
        x += w;
      }
    }
  }

  const DocumentPlan& plan_;
  const LayoutContext& ctx_;
  ComposedDocument doc_;

  int width_ = 0;
  int height_ = 0;
  double base_ = 12.0;
  int margin_ = 0;
  int cols_ = 1;
  int gap_ = 0;
  int printable_w_ = 0;
  int col_w_ = 0;
  int bottom_ = 0;
  int first_top_ = 0;
  TextStyle body_style_;

  int page_ = 0;
  int col_ = 0;
  int y_ = 0;
  // New ink may not rise above floor_; ink_floor_ is the lowest ink so far.
  int floor_ = 0;
  int ink_floor_ = 0;
  int post_ = 0;
  bool at_top_ = true;

  int plan_index_ = -1;
  Category main_category_ = Category::Paragraph;
  int main_ = -1;
  int caption_ = -1;
  std::vector<int> cell_ids_;
  std::function<void()> on_close_;
};

}  // namespace

std::string_view category_name(Category c) noexcept {
  const int i = static_cast<int>(c) - 1;
  return i >= 0 && i < kCategoryCount ? kCategoryNames[i] : "unknown";
}

Category category_from_name(std::string_view name) {
  for (int i = 0; i < kCategoryCount; ++i)
    if (kCategoryNames[i] == name) return static_cast<Category>(i + 1);
  throw Error(ErrorCode::InvalidArgument, "unknown category '" + std::string(name) + "'");
}

ShapedRun shape_run(const FontSet& fonts, TextEngine& engine, const TextStyle& style, std::u32string_view text) {
  ShapedRun run;
  double pen = 0.0;
  for (const char32_t c : text) {
    const Font& f = pick_font(fonts, style, c);
    if (run.segments.empty() || run.segments.back().font != &f)
      run.segments.push_back({&f, {}, static_cast<int>(std::floor(pen + 0.5))});
    run.segments.back().text += c;
    pen += engine.advance(f, style.size_px, c);
  }
  for (const auto& seg : run.segments)
    run.ink = unite(run.ink, translate(engine.measure(*seg.font, style.size_px, seg.text).ink, seg.x, 0));
  run.advance = pen;
  return run;
}

double run_advance(const FontSet& fonts, TextEngine& engine, const TextStyle& style, std::u32string_view text) {
  double pen = 0.0;
  for (const char32_t c : text) pen += engine.advance(pick_font(fonts, style, c), style.size_px, c);
  return pen;
}

MeasuredText measure_text(const std::vector<std::u32string>& tokens, const FontSet& fonts, TextEngine& engine,
                          const TextStyle& style, double max_width, int line_height) {
  MeasuredText m;
  auto b = break_lines(tokens, fonts, engine, style, max_width);
  m.line_starts = std::move(b.starts);
  m.lines = std::move(b.lines);
  m.forced_breaks = b.forced;
  for (std::size_t i = 0; i < m.lines.size(); ++i)
    m.extent = unite(m.extent, translate(shape_run(fonts, engine, style, m.lines[i]).ink, 0,
                                         static_cast<int>(i) * line_height));
  return m;
}

std::vector<int> split_widths(const std::vector<double>& fractions, int width) {
  std::vector<int> out;
  out.reserve(fractions.size());
  int used = 0;
  for (std::size_t i = 0; i + 1 < fractions.size(); ++i) {
    const int w = static_cast<int>(std::floor(fractions[i] * width));
    out.push_back(w);
    used += w;
  }
  if (!fractions.empty()) out.push_back(width - used);
  return out;
}

std::vector<int> fit_widths(std::vector<int> widths, const std::vector<int>& min_widths) {
  const long long total = std::accumulate(widths.begin(), widths.end(), 0LL);
  const long long need = std::accumulate(min_widths.begin(), min_widths.end(), 0LL);
  if (widths.empty() || need == 0) return widths;
  const std::size_t n = widths.size();
  if (need >= total) {
    // No room for every word: share the width in proportion to the needs.
    long long used = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      widths[i] = static_cast<int>(min_widths[i] * total / need);
      used += widths[i];
    }
    widths[n - 1] = static_cast<int>(total - used);
    return widths;
  }
  long long deficit = 0;
  long long slack = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (widths[i] < min_widths[i]) deficit += min_widths[i] - widths[i];
    else slack += widths[i] - min_widths[i];
  }
  if (deficit == 0) return widths;
  // Columns above their minimum give up width in proportion to their slack.
  long long taken = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (widths[i] < min_widths[i]) {
      widths[i] = min_widths[i];
    } else {
      const long long give = (widths[i] - min_widths[i]) * deficit / slack;
      widths[i] -= static_cast<int>(give);
      taken += give;
    }
  }
  for (std::size_t i = 0; taken < deficit; i = (i + 1) % n)
    if (widths[i] > min_widths[i]) {
      --widths[i];
      ++taken;
    }
  return widths;
}

TableLayout layout_table(const TablePlan& table, const std::vector<std::vector<std::u32string>>& cell_tokens,
                         int width, const FontSet& fonts, TextEngine& engine, const TextStyle& body, double base_px) {
  TableLayout tl;
  tl.rule = std::max(1, round_px(base_px / 14.0));
  // Padding keeps text clear of the rules.
  tl.h_pad = std::max(round_px(table.h_pad * base_px), tl.rule + 1);
  tl.v_pad = std::max(round_px(table.v_pad * base_px), tl.rule + 1);

  auto cell_style = [&](std::size_t i, double size) {
    TextStyle style = body;
    style.size_px = size;
    const auto role = table.cells[i].role;
    if (role == CellRole::Header || role == CellRole::Question) style.style = FontStyle::Bold;
    return style;
  };
  // Widest word of each column.
  auto word_widths = [&](double size) {
    std::vector<int> m(static_cast<std::size_t>(table.cols), 0);
    for (std::size_t i = 0; i < cell_tokens.size() && i < table.cells.size(); ++i) {
      auto& w = m[i % static_cast<std::size_t>(table.cols)];
      for (const auto& tok : cell_tokens[i])
        w = std::max(w, static_cast<int>(std::ceil(run_advance(fonts, engine, cell_style(i, size), tok))));
    }
    return m;
  };

  // A table too narrow for its words is set in a smaller font, down to
  // kMinTableFontRatio of its planned size, and then loses horizontal
  // padding down to the minimum.
  double size = table.font_scale * base_px;
  auto words = word_widths(size);
  long long text = std::accumulate(words.begin(), words.end(), 0LL);
  const long long pad = 2LL * tl.h_pad * table.cols;
  if (text + pad > width && text > 0) {
    const double ratio = std::max(kMinTableFontRatio, static_cast<double>(width - pad) / static_cast<double>(text));
    size = std::floor(size * ratio * 64.0) / 64.0;
    words = word_widths(size);
    text = std::accumulate(words.begin(), words.end(), 0LL);
  }
  if (text + pad > width) {
    const long long room = (width - text) / (2LL * table.cols);
    tl.h_pad = static_cast<int>(std::clamp<long long>(room, tl.rule + 1, tl.h_pad));
  }
  std::vector<int> mins(words.size());
  for (std::size_t c = 0; c < words.size(); ++c) mins[c] = words[c] + 2 * tl.h_pad;
  tl.font_size = size;
  tl.line_height = round_px(1.25 * size);
  tl.col_widths = fit_widths(split_widths(table.cell_widths, width), mins);
  tl.row_heights.assign(static_cast<std::size_t>(table.rows), tl.line_height + 2 * tl.v_pad);
  tl.cells.resize(static_cast<std::size_t>(table.rows * table.cols));

  for (int r = 0; r < table.rows; ++r) {
    int x = 0;
    for (int c = 0; c < table.cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * table.cols + c);
      auto& cb = tl.cells[i];
      cb.row = r;
      cb.col = c;
      const int w = tl.col_widths[static_cast<std::size_t>(c)];
      const TextStyle style = cell_style(i, size);
      if (i < cell_tokens.size() && !cell_tokens[i].empty()) {
        auto b = break_lines(cell_tokens[i], fonts, engine, style, std::max(1, w - 2 * tl.h_pad));
        tl.forced_breaks += b.forced;
        cb.lines = std::move(b.lines);
      }
      const int h = static_cast<int>(std::max<std::size_t>(1, cb.lines.size())) * tl.line_height + 2 * tl.v_pad;
      auto& rh = tl.row_heights[static_cast<std::size_t>(r)];
      rh = std::max(rh, h);
      cb.box = {x, 0, w, 0};
      x += w;
    }
  }
  int y = 0;
  for (int r = 0; r < table.rows; ++r) {
    for (int c = 0; c < table.cols; ++c) {
      auto& cb = tl.cells[static_cast<std::size_t>(r * table.cols + c)];
      cb.box.y = y;
      cb.box.h = tl.row_heights[static_cast<std::size_t>(r)];
    }
    y += tl.row_heights[static_cast<std::size_t>(r)];
  }
  tl.frame = {0, 0, width, y};
  return tl;
}

ComposedDocument compose(const DocumentPlan& plan, const LayoutContext& ctx) { return Composer(plan, ctx).run(); }

}  // namespace docsynth
