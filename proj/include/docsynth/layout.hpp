#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "docsynth/corpus.hpp"
#include "docsynth/font.hpp"
#include "docsynth/plan.hpp"
#include "docsynth/raster.hpp"
#include "docsynth/templates.hpp"

namespace docsynth {

/// Annotation categories with their stable dataset ids.
enum class Category : int {
  Title = 1,
  Section = 2,
  Table = 3,
  TableCell = 4,
  Figure = 5,
  HeaderFooter = 6,
  Paragraph = 7,
  Bullet = 8,
  Equation = 9,
  Caption = 10,
};
inline constexpr int kCategoryCount = 10;

std::string_view category_name(Category c) noexcept;
/// Throws InvalidArgument for an unknown name.
Category category_from_name(std::string_view name);

// --- draw operations ---------------------------------------------------------------

/// A single-font glyph run. `font` points into the FontSet the document was
/// composed with, which must outlive the ComposedDocument.
struct TextOp {
  const Font* font = nullptr;
  double size_px = 0.0;
  std::u32string text;
  int x = 0;
  int baseline = 0;
  Rgb color;
  IntRect clip;
};

/// Solid pixel-aligned rectangle.
struct RectOp {
  IntRect rect;
  Rgb color;
};

/// Anti-aliased filled path.
struct ShapeOp {
  Path path;
  Rgb color;
  IntRect clip;
};

/// Library image letterboxed into `frame`.
struct ImageOp {
  std::filesystem::path file;
  IntRect frame;
};

/// Synthetic chart (one or more subplots) drawn into `frame`.
struct ChartOp {
  std::vector<ChartPlan> charts;
  IntRect frame;
  std::vector<Rgb> palette;
  Rgb axis_color;
};

using DrawOp = std::variant<TextOp, RectOp, ShapeOp, ImageOp, ChartOp>;

struct PlacedOp {
  int page = 0;
  /// Index into ComposedDocument::elements of the element whose box must
  /// contain this op's ink.
  int owner = -1;
  /// Box the op may put ink into.
  IntRect ink;
  DrawOp op;
};

/// One ground-truth box. A body element split across columns or pages has
/// one LayoutElement per fragment.
struct LayoutElement {
  Category category = Category::Paragraph;
  int page = 0;
  IntRect box;
  /// Index within the document's element list.
  int element_id = 0;
  /// Owning table fragment for cells, figure/table for captions, else -1.
  int parent_id = -1;
  /// Index of the body element in the plan; -1 for title and header/footer.
  int plan_index = -1;
  bool operator==(const LayoutElement&) const = default;
};

struct PageInfo {
  int width = 0;
  int height = 0;
  Rgb background = kWhite;
  bool operator==(const PageInfo&) const = default;
};

struct ComposedDocument {
  std::vector<PageInfo> pages;
  std::vector<PlacedOp> placed;
  std::vector<LayoutElement> elements;
  /// Number of tokens that had to be broken inside a word because they were
  /// wider than their line.
  int forced_breaks = 0;
};

/// Everything compose needs beyond the plan. The TextEngine is the caller's
/// per-worker glyph cache.
struct LayoutContext {
  const TemplateSpec* spec = nullptr;
  const TemplateResources* resources = nullptr;
  const FontSet* fonts = nullptr;
  TextEngine* text = nullptr;
};

/// Throws FontGlyphMissing when no family of the font set covers a code
/// point, ElementTooLargeForPage when a line, table row or figure cannot fit
/// an empty column.
ComposedDocument compose(const DocumentPlan& plan, const LayoutContext& ctx);

// --- text measurement --------------------------------------------------------------

/// Font selection for a run: primary family and style; code points the
/// primary face lacks fall back to the other families in order.
struct TextStyle {
  std::size_t family = 0;
  FontStyle style = FontStyle::Regular;
  double size_px = 12.0;
};

struct ShapedSegment {
  const Font* font = nullptr;
  std::u32string text;
  /// Pen offset of the segment from the run origin (rounded).
  int x = 0;
};

struct ShapedRun {
  std::vector<ShapedSegment> segments;
  double advance = 0.0;
  /// Tight ink box relative to (origin, baseline).
  IntRect ink;
};

ShapedRun shape_run(const FontSet& fonts, TextEngine& engine, const TextStyle& style, std::u32string_view text);
/// Advance width only (no rasterization).
double run_advance(const FontSet& fonts, TextEngine& engine, const TextStyle& style, std::u32string_view text);

struct MeasuredText {
  /// Index of the first token of every line.
  std::vector<std::size_t> line_starts;
  /// Text of each line (tokens joined by single spaces, forced pieces
  /// included).
  std::vector<std::u32string> lines;
  /// Union of line inks, lines stacked `line_height` apart, relative to the
  /// first baseline; empty for no tokens.
  IntRect extent;
  int forced_breaks = 0;
};

/// Greedy first-fit breaking at token boundaries: a token joins the line
/// while the line's advance stays within `max_width`. A token wider than a
/// whole line is broken between glyphs.
MeasuredText measure_text(const std::vector<std::u32string>& tokens, const FontSet& fonts, TextEngine& engine,
                          const TextStyle& style, double max_width, int line_height);

// --- tables ------------------------------------------------------------------------

struct TableCellBox {
  int row = 0;
  int col = 0;
  IntRect box;
  /// Text lines after wrapping to the cell's inner width.
  std::vector<std::u32string> lines;
};

/// Smallest table font, relative to the planned size, used to fit words.
inline constexpr double kMinTableFontRatio = 0.6;

struct TableLayout {
  IntRect frame;
  /// Cell text size; below the planned size when the words needed it.
  double font_size = 0.0;
  std::vector<int> col_widths;
  std::vector<int> row_heights;
  int h_pad = 0;
  int v_pad = 0;
  int line_height = 0;
  int rule = 1;
  /// Row-major.
  std::vector<TableCellBox> cells;
  int forced_breaks = 0;
};

/// Column widths: floor(fraction * width) with the remainder added to the
/// last column, so they sum to `width` exactly.
std::vector<int> split_widths(const std::vector<double>& fractions, int width);

/// Widens columns narrower than their minimum at the expense of the others'
/// slack, keeping the sum. When the minimums exceed the total, the width is
/// shared in proportion to them instead.
std::vector<int> fit_widths(std::vector<int> widths, const std::vector<int>& min_widths);

/// Lays out the table at the origin with the given total width. When the
/// columns' widest words plus padding exceed the width, the font shrinks
/// (not below kMinTableFontRatio) and then the horizontal padding narrows
/// (not below one rule plus a pixel) until they fit. Column widths come from
/// split_widths, then fit_widths against those minimums. Cells tile the frame, padding sits inside each
/// cell, and each row is as tall as its tallest wrapped cell.
TableLayout layout_table(const TablePlan& table, const std::vector<std::vector<std::u32string>>& cell_tokens,
                         int width, const FontSet& fonts, TextEngine& engine, const TextStyle& body,
                         double base_px);

}  // namespace docsynth
