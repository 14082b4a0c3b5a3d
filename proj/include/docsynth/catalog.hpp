#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docsynth/probnet.hpp"

namespace docsynth {

/// Where a categorical node takes its category set from. Fixed sets are
/// listed in the catalog; the others depend on the loaded template.
enum class CategorySource {
  None,
  Fixed,
  Templates,
  BackgroundPalette,
  TextPalette,
  FillPalette,
  AccentPalette,
  Fonts,
  Vocabulary,
};

struct NodeInfo {
  std::string id;
  std::vector<std::string> parents;
  Family family;
  CategorySource categories = CategorySource::None;
  std::vector<std::string> labels;
  /// False only for the template selector, whose concentrations live in the
  /// mixture rather than in each template.
  bool per_template = true;
};

/// Every random variable the subnetworks read, in dependency order.
std::span<const NodeInfo> node_catalog();
const NodeInfo* find_node_info(std::string_view id);

/// Registry built from the catalog with placeholder hyperparameters; the
/// per-template values come from template files.
const Registry& default_registry();

// Category sets shared with the subnetworks (the index order is the order of
// the corresponding plan enums).
inline constexpr std::string_view kElementKinds[] = {"section", "table", "figure",
                                                     "paragraph", "bullet", "equation"};
inline constexpr std::string_view kFontStyles[] = {"regular", "bold", "italic", "bold_italic"};
inline constexpr std::string_view kAlignments[] = {"left", "center", "right"};
inline constexpr std::string_view kBorderTypes[] = {"none", "underline", "box", "left_bar"};
inline constexpr std::string_view kBulletTypes[] = {"disc", "dash", "square", "number", "letter"};
inline constexpr std::string_view kScriptLevels[] = {"baseline", "superscript", "subscript"};
inline constexpr std::string_view kTableBorders[] = {"none", "rows", "columns", "header", "grid", "cells"};
inline constexpr std::string_view kFigureSources[] = {"library_image", "synthetic_chart"};
inline constexpr std::string_view kChartTypes[] = {"bar", "line", "scatter", "pie", "heatmap"};
inline constexpr std::string_view kCaptionPositions[] = {"above", "below"};
inline constexpr std::string_view kHeaderContents[] = {"logo_text", "page_number", "running_title", "empty"};
inline constexpr std::string_view kSides[] = {"left", "right", "top", "bottom"};
inline constexpr std::string_view kCorners[] = {"top_left", "top_right", "bottom_left", "bottom_right"};

inline constexpr int kMaxTableCols = 6;
inline constexpr int kMaxHeaderColumns = 3;

}  // namespace docsynth
