#include "docsynth/plan.hpp"

#include "docsynth/error.hpp"

namespace nlohmann {

template <class T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& v) {
    if (v)
      j = *v;
    else
      j = nullptr;
  }
  static void from_json(const json& j, std::optional<T>& v) {
    if (j.is_null())
      v.reset();
    else
      v = j.get<T>();
  }
};

}  // namespace nlohmann

namespace docsynth {

using nlohmann::json;

void to_json(json& j, const Rgb& c) { j = to_hex(c); }
void from_json(const json& j, Rgb& c) {
  auto parsed = parse_hex_color(j.get<std::string>());
  if (!parsed) throw Error(ErrorCode::ParseError, "bad color " + j.dump());
  c = *parsed;
}

NLOHMANN_JSON_SERIALIZE_ENUM(FontStyle, {{FontStyle::Regular, "regular"},
                                         {FontStyle::Bold, "bold"},
                                         {FontStyle::Italic, "italic"},
                                         {FontStyle::BoldItalic, "bold_italic"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Align, {{Align::Left, "left"}, {Align::Center, "center"}, {Align::Right, "right"}})
NLOHMANN_JSON_SERIALIZE_ENUM(BorderType, {{BorderType::None, "none"},
                                          {BorderType::Underline, "underline"},
                                          {BorderType::Box, "box"},
                                          {BorderType::LeftBar, "left_bar"}})
NLOHMANN_JSON_SERIALIZE_ENUM(TableBorders, {{TableBorders::None, "none"},
                                            {TableBorders::Rows, "rows"},
                                            {TableBorders::Columns, "columns"},
                                            {TableBorders::Header, "header"},
                                            {TableBorders::Grid, "grid"},
                                            {TableBorders::Cells, "cells"}})
NLOHMANN_JSON_SERIALIZE_ENUM(BulletType, {{BulletType::Disc, "disc"},
                                          {BulletType::Dash, "dash"},
                                          {BulletType::Square, "square"},
                                          {BulletType::Number, "number"},
                                          {BulletType::Letter, "letter"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ScriptLevel, {{ScriptLevel::Baseline, "baseline"},
                                           {ScriptLevel::Superscript, "superscript"},
                                           {ScriptLevel::Subscript, "subscript"}})
NLOHMANN_JSON_SERIALIZE_ENUM(FigureSource, {{FigureSource::LibraryImage, "library_image"},
                                            {FigureSource::SyntheticChart, "synthetic_chart"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ChartType, {{ChartType::Bar, "bar"},
                                         {ChartType::Line, "line"},
                                         {ChartType::Scatter, "scatter"},
                                         {ChartType::Pie, "pie"},
                                         {ChartType::Heatmap, "heatmap"}})
NLOHMANN_JSON_SERIALIZE_ENUM(CaptionPosition, {{CaptionPosition::Above, "above"}, {CaptionPosition::Below, "below"}})
NLOHMANN_JSON_SERIALIZE_ENUM(HeaderContent, {{HeaderContent::LogoText, "logo_text"},
                                             {HeaderContent::PageNumber, "page_number"},
                                             {HeaderContent::RunningTitle, "running_title"},
                                             {HeaderContent::Empty, "empty"}})
NLOHMANN_JSON_SERIALIZE_ENUM(CellRole, {{CellRole::Body, "body"},
                                        {CellRole::Header, "header"},
                                        {CellRole::Question, "question"},
                                        {CellRole::Answer, "answer"}})

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Realized, params)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(HeadingStyle, font_style, align, fore_color, back_color, border, border_color,
                                   font_scale, pre_space, post_space)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SectionPlan, lines)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TitlePlan, style, lines)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CaptionPlan, position, lines, font_scale)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TableCell, line_count, lines, role, qa_ref)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TablePlan, width_fraction, align, borders, h_pad, v_pad, pre_space, post_space,
                                   rows, cols, cell_widths, header_row, col_align, font_scale, cells, caption)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ChartPlan, type, rows, cols, values, color_offset)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FigurePlan, source, image, charts, width_fraction, height_fraction, pre_space,
                                   post_space, caption)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ParagraphPlan, line_count, line_spacing, block_spacing, sentences, last_line_fill)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BulletPlan, type, offset, line_spacing, block_spacing, items)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EquationGroup, text, level)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EquationPlan, groups, spacing, block_spacing)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(HeaderPlan, columns, content, align, color, font_style, font_scale, logo,
                                   running_title)

std::string_view to_string(ElementKind kind) noexcept {
  switch (kind) {
    case ElementKind::Section: return "section";
    case ElementKind::Table: return "table";
    case ElementKind::Figure: return "figure";
    case ElementKind::Paragraph: return "paragraph";
    case ElementKind::Bullet: return "bullet";
    case ElementKind::Equation: return "equation";
  }
  return "unknown";
}

namespace {

json element_to_json(const ElementPlan& e) {
  json j;
  std::visit([&](const auto& plan) { j = plan; }, e);
  j["kind"] = std::string(to_string(kind_of(e)));
  return j;
}

ElementPlan element_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "section") return j.get<SectionPlan>();
  if (kind == "table") return j.get<TablePlan>();
  if (kind == "figure") return j.get<FigurePlan>();
  if (kind == "paragraph") return j.get<ParagraphPlan>();
  if (kind == "bullet") return j.get<BulletPlan>();
  if (kind == "equation") return j.get<EquationPlan>();
  throw Error(ErrorCode::ParseError, "plan: unknown element kind '" + kind + "'");
}

}  // namespace

json to_json(const DocumentPlan& plan) {
  json j;
  j["schema"] = "docsynth.plan/1";
  j["seed"] = plan.seed;
  j["doc_index"] = plan.doc_index;
  j["template_index"] = plan.template_index;
  j["template_id"] = plan.template_id;
  j["template_probabilities"] = plan.template_probabilities;
  j["margin"] = plan.margin;
  j["columns"] = plan.columns;
  j["background"] = plan.background;
  j["font_index"] = plan.font_index;
  j["font_name"] = plan.font_name;
  j["font_size_pt"] = plan.font_size_pt;
  j["text_color"] = plan.text_color;
  j["header"] = plan.header;
  j["footer"] = plan.footer;
  j["title"] = plan.title;
  j["section_style"] = plan.section_style;
  json body = json::array();
  for (const auto& e : plan.body) body.push_back(element_to_json(e));
  j["body"] = std::move(body);
  j["vocabulary_probs"] = plan.vocabulary_probs;
  j["realized"] = plan.realized;
  return j;
}

DocumentPlan plan_from_json(const json& j) {
  try {
    if (j.value("schema", std::string()) != "docsynth.plan/1")
      throw Error(ErrorCode::ParseError, "plan: unsupported or missing schema");
    DocumentPlan plan;
    j.at("seed").get_to(plan.seed);
    j.at("doc_index").get_to(plan.doc_index);
    j.at("template_index").get_to(plan.template_index);
    j.at("template_id").get_to(plan.template_id);
    j.at("template_probabilities").get_to(plan.template_probabilities);
    j.at("margin").get_to(plan.margin);
    j.at("columns").get_to(plan.columns);
    j.at("background").get_to(plan.background);
    j.at("font_index").get_to(plan.font_index);
    j.at("font_name").get_to(plan.font_name);
    j.at("font_size_pt").get_to(plan.font_size_pt);
    j.at("text_color").get_to(plan.text_color);
    j.at("header").get_to(plan.header);
    j.at("footer").get_to(plan.footer);
    j.at("title").get_to(plan.title);
    j.at("section_style").get_to(plan.section_style);
    for (const auto& e : j.at("body")) plan.body.push_back(element_from_json(e));
    j.at("vocabulary_probs").get_to(plan.vocabulary_probs);
    j.at("realized").get_to(plan.realized);
    return plan;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("plan: ") + e.what());
  }
}

}  // namespace docsynth
