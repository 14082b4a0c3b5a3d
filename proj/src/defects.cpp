#include "docsynth/defects.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "docsynth/catalog.hpp"
#include "docsynth/error.hpp"

namespace docsynth {

namespace {

class Draws {
 public:
  Draws(const TemplateSpec& spec, const std::map<std::string, Realized>& realized) : spec_(spec), realized_(realized) {}

  double value(const std::string& id, RngStream& rng) const {
    const auto s = spec_.params.find(id);
    if (s == spec_.params.end()) throw Error(ErrorCode::MissingTemplateParam, id);
    const auto r = realized_.find(id);
    if (r == realized_.end()) throw Error(ErrorCode::UnknownNode, id + " was not realized");
    return draw_value(s->second, r->second, rng);
  }
  bool flag(const std::string& id, RngStream& rng) const { return value(id, rng) != 0.0; }

 private:
  const TemplateSpec& spec_;
  const std::map<std::string, Realized>& realized_;
};

int luminance(const std::uint8_t* p) { return (299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000; }

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)); }

// Multiplies every pixel by a per-pixel factor in [0, 1].
template <typename F>
void darken(Image& img, F factor) {
  for (int y = 0; y < img.height; ++y) {
    std::uint8_t* p = img.row(y);
    for (int x = 0; x < img.width; ++x, p += 3) {
      const double f = factor(x, y);
      if (f >= 1.0) continue;
      for (int c = 0; c < 3; ++c) p[c] = to_byte(p[c] * f);
    }
  }
}

void bleed_through(std::vector<Image>& pages, const BleedThrough& d) {
  const std::size_t n = pages.size();
  std::vector<Image> versos = pages;
  for (auto& v : versos) gaussian_blur(v, 1.2);
  // Seepage grows faster than linearly with ink density.
  std::array<double, 256> weight{};
  for (int l = 0; l < 256; ++l) weight[static_cast<std::size_t>(l)] = d.opacity * std::pow(1.0 - l / 255.0, 0.7);
  for (std::size_t p = 0; p < n; ++p) {
    // Pages pair up as sheets; the last odd page shows its predecessor.
    std::size_t src_index = p;
    if (n > 1) src_index = p % 2 == 0 ? (p + 1 < n ? p + 1 : p - 1) : p - 1;
    const Image& verso = versos[src_index];
    Image& img = pages[p];
    if (verso.width != img.width || verso.height != img.height) continue;
    for (int y = 0; y < img.height; ++y) {
      std::uint8_t* out = img.row(y);
      const std::uint8_t* src = verso.row(y);
      for (int x = 0; x < img.width; ++x) {
        const std::uint8_t* s = src + 3 * (img.width - 1 - x);
        const double a = weight[static_cast<std::size_t>(luminance(s))];
        if (a <= 0.0) continue;
        // Seeped ink only ever darkens the recto.
        for (int c = 0; c < 3; ++c)
          out[3 * x + c] = std::min(out[3 * x + c], to_byte(out[3 * x + c] + a * (s[c] - out[3 * x + c])));
      }
    }
  }
}

void shadow(Image& img, const Shadow& d) {
  const bool horizontal = d.side == Side::Left || d.side == Side::Right;
  const double band = std::max(1.0, d.width * (horizontal ? img.width : img.height));
  darken(img, [&](int x, int y) {
    double dist = 0;
    switch (d.side) {
      case Side::Left: dist = x + 0.5; break;
      case Side::Right: dist = img.width - x - 0.5; break;
      case Side::Top: dist = y + 0.5; break;
      case Side::Bottom: dist = img.height - y - 0.5; break;
    }
    if (dist >= band) return 1.0;
    const double t = 1.0 - dist / band;
    return 1.0 - d.darkness * t * t;
  });
}

void dark_corner(Image& img, const DarkCorner& d) {
  const double r = std::max(1.0, d.radius * std::min(img.width, img.height));
  const double cx = d.corner == Corner::TopLeft || d.corner == Corner::BottomLeft ? 0.0 : img.width;
  const double cy = d.corner == Corner::TopLeft || d.corner == Corner::TopRight ? 0.0 : img.height;
  for (int y = 0; y < img.height; ++y) {
    const double dy = y + 0.5 - cy;
    if (std::abs(dy) >= r) continue;
    std::uint8_t* p = img.row(y);
    for (int x = 0; x < img.width; ++x, p += 3) {
      const double dx = x + 0.5 - cx;
      const double d2 = dx * dx + dy * dy;
      if (d2 >= r * r) continue;
      const double t = 1.0 - std::sqrt(d2) / r;
      const double f = 1.0 - d.darkness * t * t;
      // Aged paper yellows: blue fades fastest.
      p[0] = to_byte(p[0] * f);
      p[1] = to_byte(p[1] * f * (1.0 - 0.1 * (1.0 - f)));
      p[2] = to_byte(p[2] * f * (1.0 - 0.35 * (1.0 - f)));
    }
  }
}

const Font* watermark_face(const FontSet& fonts, const std::u32string& text) {
  for (const auto& fam : fonts.families)
    for (const FontStyle style : {FontStyle::Bold, FontStyle::Regular}) {
      const Font& f = fam.face(style);
      if (std::all_of(text.begin(), text.end(), [&](char32_t c) { return c == U' ' || f.has_glyph(c); })) return &f;
    }
  return fonts.families.empty() ? nullptr : &fonts.families.front().face(FontStyle::Bold);
}

void watermark(Image& img, const Watermark& d, const FontSet& fonts) {
  const std::u32string text = decode_utf8(d.text);
  const Font* font = watermark_face(fonts, text);
  if (!font || text.empty()) return;
  const double size = d.size * img.width;
  const double s = size / font->units_per_em();
  Path path;
  double pen = 0.0;
  for (const char32_t c : text) {
    const GlyphId g = font->glyph_index(c);
    if (g == 0) continue;
    Path glyph = font->outline(g);
    glyph.transform({s, 0, pen, 0, -s, 0});
    path.append(glyph);
    pen += font->advance_width(g) * s;
  }
  // Centre the run on its advance and on the middle of the ascent.
  const double mid = 0.5 * (font->ascender() + font->descender()) * s;
  const double a = -d.angle * std::numbers::pi / 180.0;
  const double ca = std::cos(a);
  const double sa = std::sin(a);
  const double ox = -pen / 2.0;
  const double oy = mid;
  const double cx = d.x * img.width;
  const double cy = d.y * img.height;
  path.transform({ca, -sa, ca * ox - sa * oy + cx, sa, ca, sa * ox + ca * oy + cy});
  fill_path(img, path, d.color, img.bounds(), d.opacity);
}

void occlusion(Image& img, const Occlusion& d) {
  const int x0 = static_cast<int>(std::floor(d.x * img.width));
  const int y0 = static_cast<int>(std::floor(d.y * img.height));
  const int w = static_cast<int>(std::floor(d.width * img.width));
  const int h = static_cast<int>(std::floor(d.height * img.height));
  fill_rect(img, intersect({x0, y0, w, h}, img.bounds()), d.color);
}

}  // namespace

std::string_view defect_name(DefectKind kind) noexcept {
  switch (kind) {
    case DefectKind::BleedThrough: return "bleed_through";
    case DefectKind::Shadow: return "shadow";
    case DefectKind::DarkCorner: return "dark_corner";
    case DefectKind::Watermark: return "watermark";
    case DefectKind::Occlusion: return "occlusion";
    case DefectKind::Blur: return "blur";
  }
  return "";
}

DefectPlan sample_defect_plan(const TemplateSpec& spec, const std::map<std::string, Realized>& realized,
                              RngStream rng) {
  const Draws draws(spec, realized);
  DefectPlan plan;
  // One stream per defect, so presence of one never shifts another's draws.
  auto stream = [&](DefectKind k) { return rng.child(static_cast<std::uint64_t>(k)); };

  if (auto r = stream(DefectKind::BleedThrough); draws.flag("defects.bleed_through.present", r))
    plan.ops.emplace_back(BleedThrough{std::clamp(draws.value("defects.bleed_through.opacity", r), 0.0, 1.0)});

  if (auto r = stream(DefectKind::Shadow); draws.flag("defects.shadow.present", r)) {
    Shadow s;
    s.side = static_cast<Side>(draws.value("defects.shadow.side", r));
    s.width = std::clamp(draws.value("defects.shadow.width", r), 0.0, 1.0);
    s.darkness = std::clamp(draws.value("defects.shadow.darkness", r), 0.0, 1.0);
    plan.ops.emplace_back(s);
  }

  if (auto r = stream(DefectKind::DarkCorner); draws.flag("defects.dark_corner.present", r)) {
    DarkCorner c;
    c.corner = static_cast<Corner>(draws.value("defects.dark_corner.corner", r));
    c.radius = std::max(0.0, draws.value("defects.dark_corner.radius", r));
    c.darkness = std::clamp(draws.value("defects.dark_corner.darkness", r), 0.0, 1.0);
    plan.ops.emplace_back(c);
  }

  if (auto r = stream(DefectKind::Watermark); draws.flag("defects.watermark.present", r)) {
    Watermark w;
    const auto text_index = static_cast<std::size_t>(draws.value("defects.watermark.text", r));
    if (spec.watermark_texts.empty()) throw Error(ErrorCode::InvalidHyperparam, "watermark_texts is empty");
    w.text = spec.watermark_texts[std::min(text_index, spec.watermark_texts.size() - 1)];
    w.angle = std::clamp(draws.value("defects.watermark.angle", r), -180.0, 180.0);
    w.x = draws.value("defects.watermark.x", r);
    w.y = draws.value("defects.watermark.y", r);
    w.opacity = std::clamp(draws.value("defects.watermark.opacity", r), 0.0, 1.0);
    w.size = std::max(0.0, draws.value("defects.watermark.size", r));
    const auto& accent = spec.palettes.accent;
    w.color = accent.empty() ? Rgb{128, 128, 128} : accent[r() % accent.size()];
    plan.ops.emplace_back(w);
  }

  if (auto r = stream(DefectKind::Occlusion); draws.flag("defects.occlusion.present", r)) {
    Occlusion o;
    o.width = std::clamp(draws.value("defects.occlusion.width", r), 0.0, 1.0);
    o.height = std::clamp(draws.value("defects.occlusion.height", r), 0.0, 1.0);
    if (o.width * o.height > kMaxOcclusionArea) {
      const double k = std::sqrt(kMaxOcclusionArea / (o.width * o.height));
      o.width *= k;
      o.height *= k;
    }
    // Position fractions place the rectangle within the page.
    o.x = std::clamp(draws.value("defects.occlusion.x", r), 0.0, 1.0) * (1.0 - o.width);
    o.y = std::clamp(draws.value("defects.occlusion.y", r), 0.0, 1.0) * (1.0 - o.height);
    const auto shade = to_byte(255.0 * std::clamp(draws.value("defects.occlusion.shade", r), 0.0, 1.0));
    o.color = {shade, shade, shade};
    plan.ops.emplace_back(o);
  }

  if (auto r = stream(DefectKind::Blur); draws.flag("defects.blur.present", r))
    plan.ops.emplace_back(Blur{std::max(0.0, draws.value("defects.blur.radius", r))});

  return plan;
}

void apply_defects(std::vector<Image>& pages, const DefectPlan& plan, const FontSet& fonts) {
  for (const auto& op : plan.ops) {
    if (const auto* b = std::get_if<BleedThrough>(&op)) {
      bleed_through(pages, *b);
      continue;
    }
    for (auto& img : pages) {
      std::visit(
          [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Shadow>) shadow(img, d);
            else if constexpr (std::is_same_v<T, DarkCorner>) dark_corner(img, d);
            else if constexpr (std::is_same_v<T, Watermark>) watermark(img, d, fonts);
            else if constexpr (std::is_same_v<T, Occlusion>) occlusion(img, d);
            else if constexpr (std::is_same_v<T, Blur>) gaussian_blur(img, d.radius);
          },
          op);
    }
  }
}

void gaussian_blur(Image& image, double sigma) {
  if (sigma <= 0.0 || image.width == 0 || image.height == 0) return;
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += std::exp(-0.5 * i * i / (sigma * sigma));
  for (int i = -r; i <= r; ++i) k[static_cast<std::size_t>(i + r)] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)) / sum);

  const int w = image.width;
  const int h = image.height;
  const std::size_t stride = static_cast<std::size_t>(w) * 3;
  // Horizontal pass over an edge-padded copy of each row.
  std::vector<float> tmp(stride * h);
  std::vector<float> padded(static_cast<std::size_t>(w + 2 * r) * 3);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = image.row(y);
    for (int x = -r; x < w + r; ++x) {
      const int sx = std::clamp(x, 0, w - 1);
      for (int c = 0; c < 3; ++c) padded[static_cast<std::size_t>(x + r) * 3 + c] = src[3 * sx + c];
    }
    float* dst = tmp.data() + stride * y;
    std::fill(dst, dst + stride, 0.0f);
    for (int i = 0; i <= 2 * r; ++i) {
      const float kw = k[static_cast<std::size_t>(i)];
      const float* in = padded.data() + static_cast<std::size_t>(i) * 3;
      for (std::size_t x = 0; x < stride; ++x) dst[x] += kw * in[x];
    }
  }
  // Vertical pass, accumulating whole rows.
  std::vector<float> acc(stride);
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0f);
    for (int i = -r; i <= r; ++i) {
      const float kw = k[static_cast<std::size_t>(i + r)];
      const float* in = tmp.data() + stride * static_cast<std::size_t>(std::clamp(y + i, 0, h - 1));
      for (std::size_t x = 0; x < stride; ++x) acc[x] += kw * in[x];
    }
    std::uint8_t* dst = image.row(y);
    for (std::size_t x = 0; x < stride; ++x) dst[x] = static_cast<std::uint8_t>(std::clamp(acc[x] + 0.5f, 0.0f, 255.0f));
  }
}

}  // namespace docsynth
