#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "docsynth/plan.hpp"
#include "docsynth/raster.hpp"
#include "docsynth/templates.hpp"

namespace docsynth {

using GlyphId = std::uint16_t;

/// A TrueType (glyf-flavoured sfnt) face. Immutable after load and safe to
/// share across threads.
class Font {
 public:
  /// Throws FontResolutionFailed when the file is missing or malformed.
  static std::shared_ptr<const Font> load(const std::filesystem::path& path);

  /// 0 (.notdef) when the face has no glyph for the code point.
  GlyphId glyph_index(char32_t code_point) const;
  bool has_glyph(char32_t code_point) const { return glyph_index(code_point) != 0; }

  int units_per_em() const noexcept { return units_per_em_; }
  int ascender() const noexcept { return ascender_; }
  int descender() const noexcept { return descender_; }
  int line_gap() const noexcept { return line_gap_; }
  int advance_width(GlyphId glyph) const;
  std::size_t glyph_count() const noexcept { return num_glyphs_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  /// Outline in font units, y up. Composite glyphs are flattened into their
  /// components.
  Path outline(GlyphId glyph) const;

 private:
  Font() = default;
  void append_outline(GlyphId glyph, const std::array<double, 6>& transform, Path& out, int depth) const;
  std::span<const std::uint8_t> glyph_data(GlyphId glyph) const;

  std::filesystem::path path_;
  std::vector<std::uint8_t> data_;
  int units_per_em_ = 2048;
  int ascender_ = 0;
  int descender_ = 0;
  int line_gap_ = 0;
  std::size_t num_glyphs_ = 0;
  std::size_t num_hmetrics_ = 0;
  bool long_loca_ = false;
  std::size_t loca_offset_ = 0;
  std::size_t glyf_offset_ = 0;
  std::size_t glyf_length_ = 0;
  std::size_t hmtx_offset_ = 0;
  std::unordered_map<char32_t, GlyphId> cmap_;
};

/// The four style faces of one family.
struct FontFamily {
  std::string name;
  std::array<std::shared_ptr<const Font>, 4> faces;  // indexed by FontStyle

  const Font& face(FontStyle style) const { return *faces[static_cast<std::size_t>(style)]; }
};

/// Families of one template, in the template's font order.
struct FontSet {
  std::vector<FontFamily> families;
};

/// Loads every family of the template's font list (a face file shared by
/// several styles is loaded once).
FontSet load_font_set(const std::vector<FontFamilyFiles>& files);

/// Decodes UTF-8; invalid sequences become U+FFFD.
std::u32string decode_utf8(std::string_view text);

/// Anti-aliased coverage bitmap of one glyph at an integer pen position.
struct GlyphBitmap {
  /// Ink box relative to the pen origin on the baseline, y down: the bitmap
  /// covers x in [left, left + width), y in [top, top + height).
  int left = 0;
  int top = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> alpha;

  bool empty() const noexcept { return width == 0 || height == 0; }
};

GlyphBitmap rasterize_glyph(const Font& font, GlyphId glyph, double size_px);

/// Horizontal metrics and ink extent of a single-line run.
struct RunMetrics {
  /// Pen advance in pixels (unrounded sum of advances).
  double advance = 0.0;
  /// Tight ink box relative to the origin (x right, y down from the
  /// baseline); empty when the run has no ink.
  IntRect ink;
};

/// Per-worker glyph cache and text measurement. Not thread-safe; every
/// worker owns one.
class TextEngine {
 public:
  /// Throws FontGlyphMissing when the run contains a code point the face
  /// lacks (whitespace included).
  RunMetrics measure(const Font& font, double size_px, std::u32string_view text);
  double advance(const Font& font, double size_px, char32_t code_point);
  /// Draws with the pen starting at (x, baseline); glyph ink outside `clip`
  /// is discarded. Pen positions are the rounded running advance, exactly
  /// as measured.
  void draw(Image& image, const Font& font, double size_px, std::u32string_view text, int x, int baseline, Rgb color,
            const IntRect& clip);

  const GlyphBitmap& glyph(const Font& font, GlyphId glyph, double size_px);

  std::size_t cache_size() const noexcept { return cache_.size(); }

 private:
  struct Key {
    const Font* font;
    GlyphId glyph;
    std::int64_t size_q;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  GlyphId require_glyph(const Font& font, char32_t code_point) const;

  std::unordered_map<Key, GlyphBitmap, KeyHash> cache_;
};

/// Line metrics scaled to pixels.
inline double ascent_px(const Font& f, double size_px) { return f.ascender() * size_px / f.units_per_em(); }
inline double descent_px(const Font& f, double size_px) { return -f.descender() * size_px / f.units_per_em(); }
inline double line_height_px(const Font& f, double size_px) {
  return (f.ascender() - f.descender() + f.line_gap()) * size_px / f.units_per_em();
}

}  // namespace docsynth
