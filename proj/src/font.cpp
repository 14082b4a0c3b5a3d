#include "docsynth/font.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "docsynth/error.hpp"

namespace docsynth {

namespace {

std::uint16_t u16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }
std::int16_t i16(const std::uint8_t* p) { return static_cast<std::int16_t>(u16(p)); }
std::uint32_t u32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

[[noreturn]] void malformed(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::FontResolutionFailed, path.string() + ": " + what);
}

// Bounds-checked view used while parsing.
struct Reader {
  const std::vector<std::uint8_t>& data;
  const std::filesystem::path& path;

  const std::uint8_t* at(std::size_t offset, std::size_t length) const {
    if (offset > data.size() || length > data.size() - offset) malformed(path, "truncated table");
    return data.data() + offset;
  }
};

// Simple-glyph flag bits.
constexpr std::uint8_t kOnCurve = 0x01;
constexpr std::uint8_t kXShort = 0x02;
constexpr std::uint8_t kYShort = 0x04;
constexpr std::uint8_t kRepeat = 0x08;
constexpr std::uint8_t kXSame = 0x10;
constexpr std::uint8_t kYSame = 0x20;

// Composite-glyph flag bits.
constexpr std::uint16_t kArgWords = 0x0001;
constexpr std::uint16_t kArgsXY = 0x0002;
constexpr std::uint16_t kHaveScale = 0x0008;
constexpr std::uint16_t kMoreComponents = 0x0020;
constexpr std::uint16_t kXYScale = 0x0040;
constexpr std::uint16_t kTwoByTwo = 0x0080;

}  // namespace

std::shared_ptr<const Font> Font::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FontResolutionFailed, "cannot open font " + path.string());
  std::shared_ptr<Font> font(new Font());
  font->path_ = path;
  font->data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  const Reader r{font->data_, path};

  const std::uint8_t* header = r.at(0, 12);
  const std::uint32_t version = u32(header);
  if (version != 0x00010000 && version != 0x74727565) malformed(path, "not a TrueType font");
  const std::uint16_t num_tables = u16(header + 4);
  std::map<std::string, std::pair<std::size_t, std::size_t>> tables;
  for (std::uint16_t i = 0; i < num_tables; ++i) {
    const std::uint8_t* rec = r.at(12 + 16 * static_cast<std::size_t>(i), 16);
    tables[std::string(reinterpret_cast<const char*>(rec), 4)] = {u32(rec + 8), u32(rec + 12)};
  }
  auto table = [&](const char* tag, std::size_t min_len) {
    auto it = tables.find(tag);
    if (it == tables.end()) malformed(path, std::string("missing '") + tag + "' table");
    r.at(it->second.first, std::max(min_len, it->second.second));
    return it->second;
  };

  const auto head = table("head", 54);
  font->units_per_em_ = u16(r.at(head.first + 18, 2));
  font->long_loca_ = i16(r.at(head.first + 50, 2)) != 0;
  if (font->units_per_em_ <= 0) malformed(path, "bad unitsPerEm");

  const auto hhea = table("hhea", 36);
  font->ascender_ = i16(r.at(hhea.first + 4, 2));
  font->descender_ = i16(r.at(hhea.first + 6, 2));
  font->line_gap_ = i16(r.at(hhea.first + 8, 2));
  font->num_hmetrics_ = u16(r.at(hhea.first + 34, 2));

  const auto maxp = table("maxp", 6);
  font->num_glyphs_ = u16(r.at(maxp.first + 4, 2));

  const auto hmtx = table("hmtx", 4 * font->num_hmetrics_);
  font->hmtx_offset_ = hmtx.first;
  const auto loca = table("loca", (font->num_glyphs_ + 1) * (font->long_loca_ ? 4 : 2));
  font->loca_offset_ = loca.first;
  const auto glyf = table("glyf", 0);
  font->glyf_offset_ = glyf.first;
  font->glyf_length_ = glyf.second;

  // cmap: prefer the full-repertoire Windows subtable (format 12), then the
  // BMP one (format 4).
  const auto cmap = table("cmap", 4);
  const std::uint16_t subtables = u16(r.at(cmap.first + 2, 2));
  std::size_t fmt4 = 0;
  std::size_t fmt12 = 0;
  for (std::uint16_t i = 0; i < subtables; ++i) {
    const std::uint8_t* rec = r.at(cmap.first + 4 + 8 * static_cast<std::size_t>(i), 8);
    const std::uint16_t platform = u16(rec);
    const std::uint16_t encoding = u16(rec + 2);
    const std::size_t offset = cmap.first + u32(rec + 4);
    const std::uint16_t format = u16(r.at(offset, 2));
    const bool unicode = platform == 0 || (platform == 3 && (encoding == 1 || encoding == 10));
    if (!unicode) continue;
    if (format == 12 && fmt12 == 0) fmt12 = offset;
    if (format == 4 && fmt4 == 0) fmt4 = offset;
  }
  if (fmt12 != 0) {
    const std::uint32_t groups = u32(r.at(fmt12 + 12, 4));
    const std::uint8_t* g = r.at(fmt12 + 16, static_cast<std::size_t>(groups) * 12);
    for (std::uint32_t i = 0; i < groups; ++i, g += 12) {
      const std::uint32_t start = u32(g);
      const std::uint32_t end = u32(g + 4);
      const std::uint32_t glyph = u32(g + 8);
      if (end < start || end - start > 0x10FFFF) malformed(path, "bad cmap group");
      for (std::uint32_t c = start; c <= end; ++c)
        if (glyph + (c - start) < font->num_glyphs_)
          font->cmap_[static_cast<char32_t>(c)] = static_cast<GlyphId>(glyph + (c - start));
    }
  } else if (fmt4 != 0) {
    const std::size_t seg_count = u16(r.at(fmt4 + 6, 2)) / 2;
    const std::size_t ends = fmt4 + 14;
    const std::size_t starts = ends + 2 * seg_count + 2;
    const std::size_t deltas = starts + 2 * seg_count;
    const std::size_t range_offsets = deltas + 2 * seg_count;
    r.at(ends, 8 * seg_count + 2);
    for (std::size_t s = 0; s < seg_count; ++s) {
      const std::uint16_t end = u16(r.at(ends + 2 * s, 2));
      const std::uint16_t start = u16(r.at(starts + 2 * s, 2));
      const std::uint16_t delta = u16(r.at(deltas + 2 * s, 2));
      const std::size_t ro_pos = range_offsets + 2 * s;
      const std::uint16_t ro = u16(r.at(ro_pos, 2));
      for (std::uint32_t c = start; c <= end && c != 0xFFFF; ++c) {
        std::uint16_t glyph;
        if (ro == 0) {
          glyph = static_cast<std::uint16_t>(c + delta);
        } else {
          const std::size_t addr = ro_pos + ro + 2 * (c - start);
          glyph = u16(r.at(addr, 2));
          if (glyph != 0) glyph = static_cast<std::uint16_t>(glyph + delta);
        }
        if (glyph != 0 && glyph < font->num_glyphs_) font->cmap_[static_cast<char32_t>(c)] = glyph;
      }
    }
  } else {
    malformed(path, "no Unicode cmap subtable");
  }
  return font;
}

GlyphId Font::glyph_index(char32_t code_point) const {
  auto it = cmap_.find(code_point);
  return it == cmap_.end() ? 0 : it->second;
}

int Font::advance_width(GlyphId glyph) const {
  if (num_hmetrics_ == 0) return 0;
  const std::size_t i = std::min<std::size_t>(glyph, num_hmetrics_ - 1);
  return u16(data_.data() + hmtx_offset_ + 4 * i);
}

std::span<const std::uint8_t> Font::glyph_data(GlyphId glyph) const {
  if (glyph >= num_glyphs_) return {};
  std::size_t begin;
  std::size_t end;
  if (long_loca_) {
    begin = u32(data_.data() + loca_offset_ + 4 * glyph);
    end = u32(data_.data() + loca_offset_ + 4 * (glyph + 1));
  } else {
    begin = 2u * u16(data_.data() + loca_offset_ + 2 * glyph);
    end = 2u * u16(data_.data() + loca_offset_ + 2 * (glyph + 1));
  }
  if (end <= begin || end > glyf_length_) return {};
  return {data_.data() + glyf_offset_ + begin, end - begin};
}

Path Font::outline(GlyphId glyph) const {
  Path out;
  append_outline(glyph, {1, 0, 0, 0, 1, 0}, out, 0);
  return out;
}

void Font::append_outline(GlyphId glyph, const std::array<double, 6>& m, Path& out, int depth) const {
  if (depth > 8) return;
  const auto g = glyph_data(glyph);
  if (g.size() < 10) return;
  const std::uint8_t* p = g.data();
  const std::uint8_t* end = g.data() + g.size();
  const int contours = i16(p);
  auto need = [&](const std::uint8_t* q, std::size_t n) {
    if (q + n > end) malformed(path_, "truncated glyph " + std::to_string(glyph));
  };
  auto apply = [&](double x, double y) { return PointF{m[0] * x + m[1] * y + m[2], m[3] * x + m[4] * y + m[5]}; };

  if (contours >= 0) {
    const std::uint8_t* q = p + 10;
    need(q, 2 * static_cast<std::size_t>(contours) + 2);
    std::vector<std::uint16_t> end_pts(static_cast<std::size_t>(contours));
    for (auto& e : end_pts) {
      e = u16(q);
      q += 2;
    }
    const std::size_t n_points = contours == 0 ? 0 : static_cast<std::size_t>(end_pts.back()) + 1;
    const std::uint16_t instr_len = u16(q);
    q += 2 + instr_len;
    std::vector<std::uint8_t> flags;
    flags.reserve(n_points);
    while (flags.size() < n_points) {
      need(q, 1);
      const std::uint8_t f = *q++;
      flags.push_back(f);
      if (f & kRepeat) {
        need(q, 1);
        for (int k = *q++; k > 0 && flags.size() < n_points; --k) flags.push_back(f);
      }
    }
    std::vector<int> xs(n_points);
    std::vector<int> ys(n_points);
    int v = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
      if (flags[i] & kXShort) {
        need(q, 1);
        v += (flags[i] & kXSame) ? *q : -*q;
        ++q;
      } else if (!(flags[i] & kXSame)) {
        need(q, 2);
        v += i16(q);
        q += 2;
      }
      xs[i] = v;
    }
    v = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
      if (flags[i] & kYShort) {
        need(q, 1);
        v += (flags[i] & kYSame) ? *q : -*q;
        ++q;
      } else if (!(flags[i] & kYSame)) {
        need(q, 2);
        v += i16(q);
        q += 2;
      }
      ys[i] = v;
    }

    std::size_t first = 0;
    for (int c = 0; c < contours; ++c) {
      const std::size_t last = end_pts[static_cast<std::size_t>(c)];
      if (last < first || last >= n_points) malformed(path_, "bad contour end");
      const std::size_t count = last - first + 1;
      auto pt = [&](std::size_t k) { return PointF{static_cast<double>(xs[first + k % count]), static_cast<double>(ys[first + k % count])}; };
      auto on = [&](std::size_t k) { return (flags[first + k % count] & kOnCurve) != 0; };
      auto mid = [](PointF a, PointF b) { return PointF{(a.x + b.x) / 2, (a.y + b.y) / 2}; };

      // Start on an on-curve point, or on the implied midpoint of two
      // off-curve points.
      std::size_t s = 0;
      while (s < count && !on(s)) ++s;
      PointF start;
      std::size_t k0;
      if (s == count) {
        start = mid(pt(0), pt(1));
        k0 = 1;
      } else {
        start = pt(s);
        k0 = s + 1;
      }
      out.move_to(apply(start.x, start.y));
      bool has_control = false;
      PointF control;
      for (std::size_t step = 0; step < count; ++step) {
        const std::size_t k = k0 + step;
        const PointF cur = pt(k);
        if (on(k)) {
          if (has_control)
            out.quad_to(apply(control.x, control.y), apply(cur.x, cur.y));
          else
            out.line_to(apply(cur.x, cur.y));
          has_control = false;
        } else {
          if (has_control) {
            const PointF m2 = mid(control, cur);
            out.quad_to(apply(control.x, control.y), apply(m2.x, m2.y));
          }
          control = cur;
          has_control = true;
        }
      }
      if (has_control) out.quad_to(apply(control.x, control.y), apply(start.x, start.y));
      first = last + 1;
    }
    return;
  }

  // Composite glyph.
  const std::uint8_t* q = p + 10;
  std::uint16_t flags;
  do {
    need(q, 4);
    flags = u16(q);
    const GlyphId component = u16(q + 2);
    q += 4;
    double dx = 0;
    double dy = 0;
    if (flags & kArgWords) {
      need(q, 4);
      if (flags & kArgsXY) {
        dx = i16(q);
        dy = i16(q + 2);
      }
      q += 4;
    } else {
      need(q, 2);
      if (flags & kArgsXY) {
        dx = static_cast<std::int8_t>(q[0]);
        dy = static_cast<std::int8_t>(q[1]);
      }
      q += 2;
    }
    double a = 1, b = 0, c = 0, d = 1;
    auto f2dot14 = [](const std::uint8_t* x) { return i16(x) / 16384.0; };
    if (flags & kHaveScale) {
      need(q, 2);
      a = d = f2dot14(q);
      q += 2;
    } else if (flags & kXYScale) {
      need(q, 4);
      a = f2dot14(q);
      d = f2dot14(q + 2);
      q += 4;
    } else if (flags & kTwoByTwo) {
      need(q, 8);
      a = f2dot14(q);
      b = f2dot14(q + 2);
      c = f2dot14(q + 4);
      d = f2dot14(q + 6);
      q += 8;
    }
    // Component space (x, y) -> (a x + c y + dx, b x + d y + dy), then the
    // parent transform.
    const std::array<double, 6> local{a, c, dx, b, d, dy};
    const std::array<double, 6> combined{
        m[0] * local[0] + m[1] * local[3], m[0] * local[1] + m[1] * local[4], m[0] * local[2] + m[1] * local[5] + m[2],
        m[3] * local[0] + m[4] * local[3], m[3] * local[1] + m[4] * local[4], m[3] * local[2] + m[4] * local[5] + m[5]};
    append_outline(component, combined, out, depth + 1);
  } while (flags & kMoreComponents);
}

FontSet load_font_set(const std::vector<FontFamilyFiles>& files) {
  FontSet set;
  std::map<std::filesystem::path, std::shared_ptr<const Font>> loaded;
  auto get = [&](const std::filesystem::path& p) {
    auto it = loaded.find(p);
    if (it != loaded.end()) return it->second;
    auto font = Font::load(p);
    loaded.emplace(p, font);
    return font;
  };
  for (const auto& f : files) {
    FontFamily family;
    family.name = f.name;
    family.faces = {get(f.regular), get(f.bold), get(f.italic), get(f.bold_italic)};
    set.families.push_back(std::move(family));
  }
  return set;
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    int len;
    char32_t cp;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(len) > text.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

// --- rasterization ---------------------------------------------------------------

namespace {

// Fixed gamma on coverage darkens thin strokes slightly.
const std::array<std::uint8_t, 256>& gamma_lut() {
  static const std::array<std::uint8_t, 256> lut = [] {
    std::array<std::uint8_t, 256> t{};
    for (int i = 0; i < 256; ++i) t[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::pow(i / 255.0, 1.0 / 1.4)));
    return t;
  }();
  return lut;
}

double quantize_size(double size_px) { return std::round(size_px * 64.0) / 64.0; }

}  // namespace

GlyphBitmap rasterize_glyph(const Font& font, GlyphId glyph, double size_px) {
  GlyphBitmap bm;
  Path path = font.outline(glyph);
  if (path.empty()) return bm;
  const double scale = size_px / font.units_per_em();
  path.transform({scale, 0, 0, 0, -scale, 0});
  double x0, y0, x1, y1;
  path.bounds(x0, y0, x1, y1);
  const int left = static_cast<int>(std::floor(x0));
  const int top = static_cast<int>(std::floor(y0));
  const int w = static_cast<int>(std::ceil(x1)) - left;
  const int h = static_cast<int>(std::ceil(y1)) - top;
  if (w <= 0 || h <= 0) return bm;
  path.transform({1, 0, -static_cast<double>(left), 0, 1, -static_cast<double>(top)});
  CoverageRasterizer r(w, h);
  r.add_path(path);
  auto cov = r.coverage();

  // Trim to the rows and columns that carry ink so the bitmap box is the
  // tight ink box.
  int cx0 = w, cy0 = h, cx1 = -1, cy1 = -1;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (cov[static_cast<std::size_t>(y) * w + x] != 0) {
        cx0 = std::min(cx0, x);
        cx1 = std::max(cx1, x);
        cy0 = std::min(cy0, y);
        cy1 = std::max(cy1, y);
      }
  if (cx1 < 0) return bm;
  bm.left = left + cx0;
  bm.top = top + cy0;
  bm.width = cx1 - cx0 + 1;
  bm.height = cy1 - cy0 + 1;
  bm.alpha.resize(static_cast<std::size_t>(bm.width) * bm.height);
  const auto& lut = gamma_lut();
  for (int y = 0; y < bm.height; ++y)
    for (int x = 0; x < bm.width; ++x)
      bm.alpha[static_cast<std::size_t>(y) * bm.width + x] =
          lut[cov[static_cast<std::size_t>(y + cy0) * w + x + cx0]];
  return bm;
}

std::size_t TextEngine::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = std::hash<const void*>()(k.font);
  h ^= std::hash<std::int64_t>()(k.size_q * 65537 + k.glyph) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  return h;
}

GlyphId TextEngine::require_glyph(const Font& font, char32_t code_point) const {
  const GlyphId g = font.glyph_index(code_point);
  if (g == 0) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(code_point));
    throw Error(ErrorCode::FontGlyphMissing, std::string(buf) + " in " + font.path().filename().string());
  }
  return g;
}

const GlyphBitmap& TextEngine::glyph(const Font& font, GlyphId glyph, double size_px) {
  const double q = quantize_size(size_px);
  const Key key{&font, glyph, static_cast<std::int64_t>(std::llround(q * 64.0))};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(key, rasterize_glyph(font, glyph, q)).first->second;
}

double TextEngine::advance(const Font& font, double size_px, char32_t code_point) {
  return font.advance_width(require_glyph(font, code_point)) * quantize_size(size_px) / font.units_per_em();
}

RunMetrics TextEngine::measure(const Font& font, double size_px, std::u32string_view text) {
  RunMetrics m;
  const double q = quantize_size(size_px);
  const double scale = q / font.units_per_em();
  double pen = 0.0;
  for (const char32_t c : text) {
    const GlyphId g = require_glyph(font, c);
    const auto& bm = glyph(font, g, q);
    if (!bm.empty()) {
      const int x = static_cast<int>(std::lround(pen));
      m.ink = unite(m.ink, {x + bm.left, bm.top, bm.width, bm.height});
    }
    pen += font.advance_width(g) * scale;
  }
  m.advance = pen;
  return m;
}

void TextEngine::draw(Image& image, const Font& font, double size_px, std::u32string_view text, int x, int baseline,
                      Rgb color, const IntRect& clip) {
  const double q = quantize_size(size_px);
  const double scale = q / font.units_per_em();
  double pen = 0.0;
  for (const char32_t c : text) {
    const GlyphId g = require_glyph(font, c);
    const auto& bm = glyph(font, g, q);
    if (!bm.empty()) {
      const int gx = x + static_cast<int>(std::lround(pen)) + bm.left;
      blend_mask(image, bm.alpha.data(), bm.width, bm.height, gx, baseline + bm.top, color, clip);
    }
    pen += font.advance_width(g) * scale;
  }
}

}  // namespace docsynth
