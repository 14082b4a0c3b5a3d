#include "docsynth/subnets.hpp"

#include <algorithm>
#include <cmath>

#include "docsynth/catalog.hpp"
#include "docsynth/error.hpp"

namespace docsynth {

namespace {

// Nodes whose value is a whole probability vector drawn per instance, so
// they have no shared first stage.
bool drawn_per_instance(std::string_view id) { return id == "table.cell_widths" || id == "vocabulary"; }

std::string key(std::string_view prefix, std::string_view field) {
  std::string out(prefix);
  out += '.';
  out += field;
  return out;
}

int as_count(double v) { return static_cast<int>(std::lround(v)); }

}  // namespace

// --- NodeDrawer -------------------------------------------------------------

NodeDrawer::NodeDrawer(const TemplateSpec& spec, const TemplateResources& resources, RngStream rng)
    : spec_(&spec), resources_(&resources) {
  const auto catalog = node_catalog();
  for (std::size_t h = 0; h < catalog.size(); ++h) {
    const NodeInfo& info = catalog[h];
    if (!info.per_template || drawn_per_instance(info.id)) continue;
    auto node_rng = rng.child(h);
    realized_.emplace(info.id, realize(spec_of(info.id), node_rng));
  }
  auto vocab_rng = rng.child(catalog.size());
  vocabulary_probs_ = realize(spec_of("vocabulary"), vocab_rng).params;
  vocabulary_table_ = dist::CategoricalTable(vocabulary_probs_);
}

const DistributionSpec& NodeDrawer::spec_of(std::string_view id) const {
  auto it = spec_->params.find(id);
  if (it == spec_->params.end()) throw Error(ErrorCode::MissingTemplateParam, std::string(id));
  return it->second;
}

double NodeDrawer::value(std::string_view id, RngStream& rng) const {
  auto it = realized_.find(std::string(id));
  if (it == realized_.end()) throw Error(ErrorCode::UnknownNode, std::string(id));
  return draw_value(spec_of(id), it->second, rng);
}

std::size_t NodeDrawer::index(std::string_view id, RngStream& rng) const {
  return static_cast<std::size_t>(value(id, rng));
}

bool NodeDrawer::flag(std::string_view id, RngStream& rng) const { return value(id, rng) != 0.0; }

TokenLine NodeDrawer::tokens(std::size_t count, RngStream& rng) const {
  TokenLine line(count);
  for (auto& t : line) t = token(rng);
  return line;
}

// --- element subnetworks -----------------------------------------------------

HeadingStyle sample_heading_style(const NodeDrawer& nodes, std::string_view prefix, RngStream& rng) {
  const Palettes& pal = nodes.spec().palettes;
  HeadingStyle s;
  s.font_style = static_cast<FontStyle>(nodes.index(key(prefix, "font_style"), rng));
  s.align = static_cast<Align>(nodes.index(key(prefix, "align"), rng));
  s.fore_color = pal.text.at(nodes.index(key(prefix, "fore_color"), rng));
  s.back_color = pal.fill.at(nodes.index(key(prefix, "back_color"), rng));
  s.border = static_cast<BorderType>(nodes.index(key(prefix, "border_type"), rng));
  s.border_color = pal.accent.at(nodes.index(key(prefix, "border_color"), rng));
  s.font_scale = nodes.value(key(prefix, "font_scale"), rng);
  s.pre_space = nodes.value(key(prefix, "pre_space"), rng);
  s.post_space = nodes.value(key(prefix, "post_space"), rng);
  return s;
}

std::vector<TokenLine> sample_heading_lines(const NodeDrawer& nodes, std::string_view prefix, RngStream& rng) {
  // L ~ Mult(l_d); each line draws its own W ~ N(mu_w, sigma_w^2), then the
  // tokens i.i.d. from the document's vocabulary distribution.
  const std::size_t line_count = nodes.index(key(prefix, "lines"), rng) + 1;
  std::vector<TokenLine> lines(line_count);
  for (auto& line : lines) {
    const int words = std::max(1, as_count(nodes.value(key(prefix, "words_per_line"), rng)));
    line = nodes.tokens(static_cast<std::size_t>(words), rng);
  }
  return lines;
}

SectionPlan sample_section(const NodeDrawer& nodes, RngStream& rng) {
  return SectionPlan{sample_heading_lines(nodes, "section", rng)};
}

TitlePlan sample_title(const NodeDrawer& nodes, RngStream& rng) {
  TitlePlan t;
  t.style = sample_heading_style(nodes, "title", rng);
  t.lines = sample_heading_lines(nodes, "title", rng);
  return t;
}

CaptionPlan sample_caption(const NodeDrawer& nodes, RngStream& rng) {
  CaptionPlan c;
  c.position = static_cast<CaptionPosition>(nodes.index("caption.position", rng));
  const int line_count = std::clamp(as_count(nodes.value("caption.lines", rng)), 1, 3);
  for (int i = 0; i < line_count; ++i) {
    const int words = std::max(1, as_count(nodes.value("caption.words_per_line", rng)));
    c.lines.push_back(nodes.tokens(static_cast<std::size_t>(words), rng));
  }
  c.font_scale = nodes.value("caption.font_scale", rng);
  return c;
}

TablePlan sample_table(const NodeDrawer& nodes, RngStream& rng) {
  TablePlan t;
  t.width_fraction = nodes.value("table.width", rng);
  t.align = static_cast<Align>(nodes.index("table.align", rng));
  t.borders = static_cast<TableBorders>(nodes.index("table.borders", rng));
  t.h_pad = nodes.value("table.h_pad", rng);
  t.v_pad = nodes.value("table.v_pad", rng);
  t.pre_space = nodes.value("table.pre_space", rng);
  t.post_space = nodes.value("table.post_space", rng);
  t.rows = std::max(1, as_count(nodes.value("table.rows", rng)));
  t.cols = static_cast<int>(nodes.index("table.cols", rng)) + 1;

  const auto& alpha = std::get<DirichletParams>(nodes.spec().params.at("table.cell_widths").params).alpha;
  t.cell_widths = dist::dirichlet(rng, std::span<const double>(alpha).first(static_cast<std::size_t>(t.cols)));

  t.header_row = nodes.flag("table.header_row", rng);
  for (int c = 0; c < t.cols; ++c) t.col_align.push_back(static_cast<Align>(nodes.index("table.col_align", rng)));
  t.font_scale = nodes.value("table.font_scale", rng);

  const bool qa = nodes.spec().table_content == TableContent::QaPairs;
  const auto qa_count = static_cast<std::int64_t>(nodes.resources().qa_pairs.size());
  t.cells.resize(static_cast<std::size_t>(t.rows * t.cols));
  for (int r = 0; r < t.rows; ++r) {
    const bool header = t.header_row && r == 0;
    for (int c = 0; c < t.cols; ++c) {
      TableCell& cell = t.cells[static_cast<std::size_t>(r * t.cols + c)];
      if (qa && !header && qa_count > 0 && c + 1 < t.cols && c % 2 == 0) {
        // A question cell and its answer to the right share one corpus entry.
        const auto ref = static_cast<std::int32_t>(dist::uniform_int(rng, 0, qa_count - 1));
        cell = TableCell{1, {}, CellRole::Question, ref};
        t.cells[static_cast<std::size_t>(r * t.cols + c + 1)] = TableCell{1, {}, CellRole::Answer, ref};
        ++c;
        continue;
      }
      cell.role = header ? CellRole::Header : CellRole::Body;
      cell.line_count = static_cast<int>(nodes.index("table.cell_lines", rng));
      if (header) cell.line_count = std::max(cell.line_count, 1);
      for (int l = 0; l < cell.line_count; ++l) {
        const int words = std::max(1, as_count(nodes.value("table.cell_words", rng)));
        cell.lines.push_back(nodes.tokens(static_cast<std::size_t>(words), rng));
      }
    }
  }
  if (nodes.flag("table.caption", rng)) t.caption = sample_caption(nodes, rng);
  return t;
}

FigurePlan sample_figure(const NodeDrawer& nodes, RngStream& rng) {
  FigurePlan f;
  f.source = static_cast<FigureSource>(nodes.index("figure.source", rng));
  if (f.source == FigureSource::LibraryImage) {
    const auto& images = nodes.resources().images;
    if (images.empty())
      throw Error(ErrorCode::EmptyImageLibrary, "no images under " + nodes.resources().image_root.string());
    f.image = images[static_cast<std::size_t>(
        dist::uniform_int(rng, 0, static_cast<std::int64_t>(images.size()) - 1))];
  } else {
    const std::size_t subplots = nodes.index("figure.subplots", rng) + 1;
    const auto palette_size = static_cast<std::int64_t>(nodes.spec().palettes.chart.size());
    for (std::size_t s = 0; s < subplots; ++s) {
      ChartPlan chart;
      chart.type = static_cast<ChartType>(nodes.index("figure.chart_type", rng));
      const int n = std::max(1, as_count(nodes.value("figure.points", rng)));
      switch (chart.type) {
        case ChartType::Bar:
        case ChartType::Line: chart.rows = 1; chart.cols = n; break;
        case ChartType::Scatter: chart.rows = 2; chart.cols = 3 * n; break;
        case ChartType::Pie: chart.rows = 1; chart.cols = std::min(n, 8); break;
        case ChartType::Heatmap: chart.rows = n; chart.cols = n; break;
      }
      chart.values.resize(static_cast<std::size_t>(chart.rows * chart.cols));
      // Pie wedges must have positive mass, the other charts use [0, 1).
      for (double& v : chart.values) v = chart.type == ChartType::Pie ? rng.uniform_open() : rng.uniform();
      chart.color_offset = static_cast<std::uint32_t>(dist::uniform_int(rng, 0, palette_size - 1));
      f.charts.push_back(std::move(chart));
    }
  }
  f.width_fraction = nodes.value("figure.width", rng);
  f.height_fraction = nodes.value("figure.height", rng);
  f.pre_space = nodes.value("figure.pre_space", rng);
  f.post_space = nodes.value("figure.post_space", rng);
  if (nodes.flag("figure.caption", rng)) f.caption = sample_caption(nodes, rng);
  return f;
}

ParagraphPlan sample_paragraph(const NodeDrawer& nodes, RngStream& rng) {
  ParagraphPlan p;
  p.line_count = std::max(1, as_count(nodes.value("paragraph.lines", rng)));
  p.line_spacing = nodes.value("paragraph.line_spacing", rng);
  p.block_spacing = nodes.value("paragraph.block_spacing", rng);
  const auto n = static_cast<std::int64_t>(nodes.resources().sentences.size());
  // Roughly one sentence per line; layout cycles through them if short.
  for (int i = 0; i < p.line_count + 2; ++i)
    p.sentences.push_back(static_cast<std::uint32_t>(dist::uniform_int(rng, 0, n - 1)));
  p.last_line_fill = dist::uniform(rng, 0.3, 1.0);
  return p;
}

BulletPlan sample_bullet(const NodeDrawer& nodes, RngStream& rng) {
  BulletPlan b;
  b.type = static_cast<BulletType>(nodes.index("bullet.type", rng));
  b.offset = nodes.value("bullet.offset", rng);
  b.line_spacing = nodes.value("bullet.line_spacing", rng);
  b.block_spacing = nodes.value("bullet.block_spacing", rng);
  const int items = std::max(1, as_count(nodes.value("bullet.lines", rng)));
  const auto n = static_cast<std::int64_t>(nodes.resources().sentences.size());
  for (int i = 0; i < items; ++i) b.items.push_back(static_cast<std::uint32_t>(dist::uniform_int(rng, 0, n - 1)));
  return b;
}

namespace {

constexpr std::string_view kLatin[] = {"a", "b", "c", "d", "f", "k", "n", "p", "q", "r",
                                       "t", "x", "y", "z", "A", "B", "F", "L", "N", "X"};
constexpr std::string_view kGreek[] = {"α", "β", "γ", "δ", "ε", "θ", "λ", "μ", "π", "σ", "φ", "ω", "Σ", "Ω"};
constexpr std::string_view kOperators[] = {"+", "−", "=", "×", "·", "≤", "≥", "±", "/"};

template <std::size_t N>
std::string_view pick(const std::string_view (&pool)[N], RngStream& rng) {
  return pool[static_cast<std::size_t>(dist::uniform_int(rng, 0, static_cast<std::int64_t>(N) - 1))];
}

}  // namespace

EquationPlan sample_equation(const NodeDrawer& nodes, RngStream& rng) {
  EquationPlan e;
  const int groups = std::max(1, as_count(nodes.value("equation.groups", rng)));
  e.spacing = nodes.value("equation.spacing", rng);
  e.block_spacing = nodes.value("equation.block_spacing", rng);
  for (int g = 0; g < groups; ++g) {
    EquationGroup group;
    // Operands and operators alternate, and the expression ends on an operand.
    const bool operand = g % 2 == 0 || g == groups - 1;
    if (operand) {
      std::string text;
      if (rng.uniform() < 0.2) text += std::to_string(dist::uniform_int(rng, 2, 9));
      text += rng.uniform() < 0.7 ? pick(kLatin, rng) : pick(kGreek, rng);
      group.text = std::move(text);
      const auto level = static_cast<ScriptLevel>(nodes.index("equation.script_level", rng));
      // A script needs a base to attach to.
      group.level = g == 0 ? ScriptLevel::Baseline : level;
    } else {
      group.text = std::string(pick(kOperators, rng));
    }
    e.groups.push_back(std::move(group));
  }
  return e;
}

HeaderPlan sample_header(const NodeDrawer& nodes, std::string_view prefix, RngStream& rng) {
  HeaderPlan h;
  h.columns = static_cast<int>(nodes.index(key(prefix, "columns"), rng)) + 1;
  for (int slot = 0; slot < h.columns; ++slot) {
    h.content.push_back(
        static_cast<HeaderContent>(nodes.index(key(prefix, "content." + std::to_string(slot)), rng)));
    h.align.push_back(static_cast<Align>(nodes.index(key(prefix, "align"), rng)));
  }
  h.color = nodes.spec().palettes.text.at(nodes.index(key(prefix, "color"), rng));
  h.font_style = static_cast<FontStyle>(nodes.index(key(prefix, "font_style"), rng));
  h.font_scale = nodes.value(key(prefix, "font_scale"), rng);
  h.logo = nodes.tokens(1, rng);
  h.running_title = nodes.tokens(
      static_cast<std::size_t>(std::max(1, as_count(nodes.value(key(prefix, "title_words"), rng)))), rng);
  return h;
}

// --- document ---------------------------------------------------------------

DocumentPlan sample_document_plan(const TemplateMixture& mixture, std::span<const TemplateResources> resources,
                                  std::uint64_t doc_index, std::uint64_t seed) {
  const RngStream root(seed, {doc_index});
  DocumentPlan plan;
  plan.seed = seed;
  plan.doc_index = doc_index;

  auto template_rng = root.child(kStreamTemplate);
  const TemplateChoice choice = choose_template(mixture, template_rng);
  plan.template_index = choice.index;
  plan.template_probabilities = choice.probabilities;
  const TemplateSpec& spec = mixture.templates.at(choice.index);
  plan.template_id = spec.template_id;

  const NodeDrawer nodes(spec, resources[choice.index], root.child(kStreamRealize));
  plan.realized = nodes.realized();
  plan.vocabulary_probs = nodes.vocabulary_probs();

  auto rng = root.child(kStreamDocument);
  plan.margin = nodes.value("margin", rng);
  plan.columns = static_cast<int>(nodes.index("columns", rng)) + 1;
  plan.background = spec.palettes.background.at(nodes.index("background", rng));
  plan.font_index = nodes.index("font.name", rng);
  plan.font_name = spec.fonts.at(plan.font_index).name;
  plan.font_size_pt = nodes.value("font.size", rng);
  plan.text_color = spec.palettes.text.at(nodes.index("text.color", rng));
  const bool has_header = nodes.flag("header.present", rng);
  const bool has_footer = nodes.flag("footer.present", rng);
  const bool has_title = nodes.flag("title.present", rng);

  if (has_title) {
    auto r = root.child(kStreamTitle);
    plan.title = sample_title(nodes, r);
  }
  if (has_header) {
    auto r = root.child(kStreamHeader);
    plan.header = sample_header(nodes, "header", r);
  }
  if (has_footer) {
    auto r = root.child(kStreamFooter);
    plan.footer = sample_header(nodes, "footer", r);
  }
  {
    auto r = root.child(kStreamSectionStyle);
    plan.section_style = sample_heading_style(nodes, "section", r);
  }

  auto body_rng = root.child(kStreamBody);
  const int count = std::max(1, as_count(nodes.value("elements.count", body_rng)));
  for (int i = 0; i < count; ++i) {
    const auto kind = static_cast<ElementKind>(nodes.index("elements.kind", body_rng));
    auto r = root.child(kStreamElementBase + static_cast<std::uint64_t>(i));
    switch (kind) {
      case ElementKind::Section: plan.body.emplace_back(sample_section(nodes, r)); break;
      case ElementKind::Table: plan.body.emplace_back(sample_table(nodes, r)); break;
      case ElementKind::Figure: plan.body.emplace_back(sample_figure(nodes, r)); break;
      case ElementKind::Paragraph: plan.body.emplace_back(sample_paragraph(nodes, r)); break;
      case ElementKind::Bullet: plan.body.emplace_back(sample_bullet(nodes, r)); break;
      case ElementKind::Equation: plan.body.emplace_back(sample_equation(nodes, r)); break;
    }
  }
  return plan;
}

}  // namespace docsynth
