#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "docsynth/color.hpp"
#include "docsynth/probnet.hpp"

namespace docsynth {

// Enumerations follow the category order of the matching catalog nodes.
enum class ElementKind { Section, Table, Figure, Paragraph, Bullet, Equation };
enum class FontStyle { Regular, Bold, Italic, BoldItalic };
enum class Align { Left, Center, Right };
enum class BorderType { None, Underline, Box, LeftBar };
enum class TableBorders { None, Rows, Columns, Header, Grid, Cells };
enum class BulletType { Disc, Dash, Square, Number, Letter };
enum class ScriptLevel { Baseline, Superscript, Subscript };
enum class FigureSource { LibraryImage, SyntheticChart };
enum class ChartType { Bar, Line, Scatter, Pie, Heatmap };
enum class CaptionPosition { Above, Below };
enum class HeaderContent { LogoText, PageNumber, RunningTitle, Empty };
enum class CellRole { Body, Header, Question, Answer };

/// One line of vocabulary indices.
using TokenLine = std::vector<std::uint32_t>;

/// Style of a heading block. Spacing and scale are in base units (multiples
/// of the document font size).
struct HeadingStyle {
  FontStyle font_style = FontStyle::Regular;
  Align align = Align::Left;
  Rgb fore_color;
  std::optional<Rgb> back_color;
  BorderType border = BorderType::None;
  Rgb border_color;
  double font_scale = 1.0;
  double pre_space = 0.0;
  double post_space = 0.0;
  bool operator==(const HeadingStyle&) const = default;
};

struct SectionPlan {
  std::vector<TokenLine> lines;
  bool operator==(const SectionPlan&) const = default;
};

struct TitlePlan {
  HeadingStyle style;
  std::vector<TokenLine> lines;
  bool operator==(const TitlePlan&) const = default;
};

struct CaptionPlan {
  CaptionPosition position = CaptionPosition::Below;
  std::vector<TokenLine> lines;
  double font_scale = 1.0;
  bool operator==(const CaptionPlan&) const = default;
};

struct TableCell {
  /// Sampled line-count category: 0 empty, 1 single value, 2+ wrapped.
  int line_count = 0;
  std::vector<TokenLine> lines;
  CellRole role = CellRole::Body;
  /// Index into the question/answer corpus for Question/Answer cells.
  std::int32_t qa_ref = -1;
  bool operator==(const TableCell&) const = default;
};

struct TablePlan {
  double width_fraction = 1.0;
  Align align = Align::Left;
  TableBorders borders = TableBorders::None;
  double h_pad = 0.0;
  double v_pad = 0.0;
  double pre_space = 0.0;
  double post_space = 0.0;
  int rows = 1;
  int cols = 1;
  std::vector<double> cell_widths;
  bool header_row = false;
  std::vector<Align> col_align;
  double font_scale = 1.0;
  /// Row-major, rows * cols entries.
  std::vector<TableCell> cells;
  std::optional<CaptionPlan> caption;

  const TableCell& cell(int r, int c) const { return cells.at(static_cast<std::size_t>(r * cols + c)); }
  bool operator==(const TablePlan&) const = default;
};

struct ChartPlan {
  ChartType type = ChartType::Bar;
  /// Values in [0, 1]. Bar/line/pie: one row; scatter: x row then y row;
  /// heatmap: rows x cols grid.
  int rows = 1;
  int cols = 0;
  std::vector<double> values;
  std::uint32_t color_offset = 0;
  bool operator==(const ChartPlan&) const = default;
};

struct FigurePlan {
  FigureSource source = FigureSource::SyntheticChart;
  /// Library image path relative to the image library root.
  std::string image;
  std::vector<ChartPlan> charts;
  double width_fraction = 1.0;
  double height_fraction = 0.25;
  double pre_space = 0.0;
  double post_space = 0.0;
  std::optional<CaptionPlan> caption;
  bool operator==(const FigurePlan&) const = default;
};

struct ParagraphPlan {
  int line_count = 1;
  double line_spacing = 1.2;
  double block_spacing = 0.0;
  /// Sentences concatenated in order to fill the lines.
  std::vector<std::uint32_t> sentences;
  /// Fraction of the column filled by the last line.
  double last_line_fill = 1.0;
  bool operator==(const ParagraphPlan&) const = default;
};

struct BulletPlan {
  BulletType type = BulletType::Disc;
  double offset = 0.0;
  double line_spacing = 1.2;
  double block_spacing = 0.0;
  /// One sentence per item.
  std::vector<std::uint32_t> items;
  bool operator==(const BulletPlan&) const = default;
};

struct EquationGroup {
  std::string text;
  ScriptLevel level = ScriptLevel::Baseline;
  bool operator==(const EquationGroup&) const = default;
};

struct EquationPlan {
  std::vector<EquationGroup> groups;
  double spacing = 0.3;
  double block_spacing = 0.0;
  bool operator==(const EquationPlan&) const = default;
};

/// Index order matches ElementKind.
using ElementPlan = std::variant<SectionPlan, TablePlan, FigurePlan, ParagraphPlan, BulletPlan, EquationPlan>;

inline ElementKind kind_of(const ElementPlan& e) { return static_cast<ElementKind>(e.index()); }

struct HeaderPlan {
  int columns = 1;
  std::vector<HeaderContent> content;
  std::vector<Align> align;
  Rgb color;
  FontStyle font_style = FontStyle::Regular;
  double font_scale = 1.0;
  TokenLine logo;
  TokenLine running_title;
  bool operator==(const HeaderPlan&) const = default;
};

struct DocumentPlan {
  std::uint64_t seed = 0;
  std::uint64_t doc_index = 0;
  std::size_t template_index = 0;
  std::string template_id;
  std::vector<double> template_probabilities;

  double margin = 0.08;
  int columns = 1;
  Rgb background = kWhite;
  std::size_t font_index = 0;
  std::string font_name;
  double font_size_pt = 10.0;
  Rgb text_color = kBlack;

  std::optional<HeaderPlan> header;
  std::optional<HeaderPlan> footer;
  std::optional<TitlePlan> title;
  HeadingStyle section_style;
  std::vector<ElementPlan> body;

  std::vector<double> vocabulary_probs;
  /// First-stage draws of every other node, keyed by node id.
  std::map<std::string, Realized> realized;

  bool operator==(const DocumentPlan&) const = default;
};

nlohmann::json to_json(const DocumentPlan& plan);
DocumentPlan plan_from_json(const nlohmann::json& j);

std::string_view to_string(ElementKind kind) noexcept;

}  // namespace docsynth
