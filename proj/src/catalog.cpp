#include "docsynth/catalog.hpp"

#include <algorithm>

namespace docsynth {
namespace {

using Labels = std::vector<std::string>;

template <std::size_t N>
Labels labels_of(const std::string_view (&values)[N]) {
  return Labels(std::begin(values), std::end(values));
}

Labels counting(int first, int last) {
  Labels out;
  for (int i = first; i <= last; ++i) out.push_back(std::to_string(i));
  return out;
}

class CatalogBuilder {
 public:
  void categorical(std::string id, Labels labels, std::vector<std::string> parents = {"template"}) {
    nodes_.push_back({std::move(id), std::move(parents), Family::DirichletCategorical,
                      CategorySource::Fixed, std::move(labels)});
  }
  void bound(std::string id, CategorySource source, std::vector<std::string> parents = {"template"}) {
    nodes_.push_back({std::move(id), std::move(parents), Family::DirichletCategorical, source, {}});
  }
  void node(std::string id, Family family, std::vector<std::string> parents = {"template"}) {
    nodes_.push_back({std::move(id), std::move(parents), family, CategorySource::None, {}});
  }
  std::vector<NodeInfo> take() { return std::move(nodes_); }

 private:
  std::vector<NodeInfo> nodes_;
};

// Style variables shared by every section of a document, and by the title.
void heading_nodes(CatalogBuilder& b, const std::string& p) {
  b.categorical(p + ".font_style", labels_of(kFontStyles));
  b.categorical(p + ".align", labels_of(kAlignments));
  b.bound(p + ".fore_color", CategorySource::TextPalette);
  b.bound(p + ".back_color", CategorySource::FillPalette);
  b.categorical(p + ".border_type", labels_of(kBorderTypes));
  b.bound(p + ".border_color", CategorySource::AccentPalette);
  b.node(p + ".font_scale", Family::UniformContinuous);
  b.node(p + ".pre_space", Family::UniformContinuous);
  b.node(p + ".post_space", Family::UniformContinuous);
  b.categorical(p + ".lines", counting(1, 4));
  b.node(p + ".words_per_line", Family::NormalWithNormalInvGammaPrior, {"template", p + ".lines"});
}

void band_nodes(CatalogBuilder& b, const std::string& p) {
  b.categorical(p + ".columns", counting(1, kMaxHeaderColumns), {"template", p + ".present"});
  for (int slot = 0; slot < kMaxHeaderColumns; ++slot)
    b.categorical(p + ".content." + std::to_string(slot), labels_of(kHeaderContents),
                  {"template", p + ".columns"});
  b.categorical(p + ".align", labels_of(kAlignments), {"template", p + ".columns"});
  b.bound(p + ".color", CategorySource::TextPalette, {"template", p + ".present"});
  b.categorical(p + ".font_style", labels_of(kFontStyles), {"template", p + ".present"});
  b.node(p + ".font_scale", Family::UniformContinuous, {"template", p + ".present"});
  b.node(p + ".title_words", Family::UniformDiscrete, {"template", p + ".present"});
}

std::vector<NodeInfo> build_catalog() {
  CatalogBuilder b;

  // Document-level variables.
  b.categorical("columns", counting(1, 3));
  b.node("margin", Family::NormalWithNormalInvGammaPrior);
  b.bound("background", CategorySource::BackgroundPalette);
  b.bound("font.name", CategorySource::Fonts);
  b.node("font.size", Family::ShiftedExponentialWithGammaScale);
  b.bound("text.color", CategorySource::TextPalette);
  b.node("header.present", Family::BetaBernoulli);
  b.node("footer.present", Family::BetaBernoulli);
  b.node("title.present", Family::BetaBernoulli);
  b.categorical("elements.kind", labels_of(kElementKinds));
  b.node("elements.count", Family::Poisson);
  b.bound("vocabulary", CategorySource::Vocabulary);

  heading_nodes(b, "section");
  heading_nodes(b, "title");

  b.node("paragraph.lines", Family::UniformDiscrete);
  b.node("paragraph.line_spacing", Family::UniformContinuous);
  b.node("paragraph.block_spacing", Family::UniformContinuous);

  b.node("bullet.lines", Family::UniformDiscrete);
  b.node("bullet.line_spacing", Family::UniformContinuous);
  b.node("bullet.block_spacing", Family::UniformContinuous);
  b.categorical("bullet.type", labels_of(kBulletTypes));
  b.node("bullet.offset", Family::UniformContinuous);

  b.node("equation.groups", Family::UniformDiscrete);
  b.categorical("equation.script_level", labels_of(kScriptLevels), {"template", "equation.groups"});
  b.node("equation.spacing", Family::UniformContinuous);
  b.node("equation.block_spacing", Family::UniformContinuous);

  b.node("table.width", Family::UniformContinuous);
  b.categorical("table.align", labels_of(kAlignments));
  b.categorical("table.borders", labels_of(kTableBorders));
  b.node("table.h_pad", Family::ShiftedExponentialWithGammaScale);
  b.node("table.v_pad", Family::ShiftedExponentialWithGammaScale);
  b.node("table.pre_space", Family::UniformContinuous);
  b.node("table.post_space", Family::UniformContinuous);
  b.node("table.rows", Family::TruncatedCauchy);
  b.categorical("table.cols", counting(1, kMaxTableCols));
  b.categorical("table.cell_widths", counting(1, kMaxTableCols), {"template", "table.cols"});
  b.categorical("table.cell_lines", counting(0, 3), {"template", "table.rows", "table.cols"});
  b.node("table.cell_words", Family::NormalWithNormalInvGammaPrior, {"template", "table.cell_lines"});
  b.node("table.header_row", Family::BetaBernoulli);
  b.categorical("table.col_align", labels_of(kAlignments), {"template", "table.cols"});
  b.node("table.font_scale", Family::UniformContinuous);
  b.node("table.caption", Family::BetaBernoulli);

  b.categorical("figure.source", labels_of(kFigureSources));
  b.categorical("figure.subplots", counting(1, 4), {"template", "figure.source"});
  b.categorical("figure.chart_type", labels_of(kChartTypes), {"template", "figure.subplots"});
  b.node("figure.points", Family::UniformDiscrete, {"template", "figure.chart_type"});
  b.node("figure.width", Family::UniformContinuous);
  b.node("figure.height", Family::UniformContinuous);
  b.node("figure.pre_space", Family::UniformContinuous);
  b.node("figure.post_space", Family::UniformContinuous);
  b.node("figure.caption", Family::BetaBernoulli);

  b.categorical("caption.position", labels_of(kCaptionPositions), {"template", "table.caption", "figure.caption"});
  b.node("caption.lines", Family::UniformDiscrete, {"template", "table.caption", "figure.caption"});
  b.node("caption.words_per_line", Family::NormalWithNormalInvGammaPrior, {"template", "caption.lines"});
  b.node("caption.font_scale", Family::UniformContinuous);

  band_nodes(b, "header");
  band_nodes(b, "footer");

  b.node("defects.bleed_through.present", Family::BetaBernoulli);
  b.node("defects.bleed_through.opacity", Family::UniformContinuous, {"template", "defects.bleed_through.present"});
  b.node("defects.shadow.present", Family::BetaBernoulli);
  b.categorical("defects.shadow.side", labels_of(kSides), {"template", "defects.shadow.present"});
  b.node("defects.shadow.width", Family::UniformContinuous, {"template", "defects.shadow.present"});
  b.node("defects.shadow.darkness", Family::UniformContinuous, {"template", "defects.shadow.present"});
  b.node("defects.dark_corner.present", Family::BetaBernoulli);
  b.categorical("defects.dark_corner.corner", labels_of(kCorners), {"template", "defects.dark_corner.present"});
  b.node("defects.dark_corner.radius", Family::UniformContinuous, {"template", "defects.dark_corner.present"});
  b.node("defects.dark_corner.darkness", Family::UniformContinuous, {"template", "defects.dark_corner.present"});
  b.node("defects.watermark.present", Family::BetaBernoulli);
  for (const char* field : {"text", "angle", "x", "y", "opacity", "size"}) {
    const Family family = std::string_view(field) == "text" ? Family::UniformDiscrete : Family::UniformContinuous;
    b.node(std::string("defects.watermark.") + field, family, {"template", "defects.watermark.present"});
  }
  b.node("defects.occlusion.present", Family::BetaBernoulli);
  for (const char* field : {"width", "height", "x", "y", "shade"})
    b.node(std::string("defects.occlusion.") + field, Family::UniformContinuous,
           {"template", "defects.occlusion.present"});
  b.node("defects.blur.present", Family::BetaBernoulli);
  b.node("defects.blur.radius", Family::UniformContinuous, {"template", "defects.blur.present"});

  std::vector<NodeInfo> nodes;
  nodes.push_back({"template", {}, Family::DirichletCategorical, CategorySource::Templates, {}, false});
  auto rest = b.take();
  nodes.insert(nodes.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
  return nodes;
}

DistributionSpec placeholder(const NodeInfo& info) {
  DistributionSpec spec;
  switch (info.family) {
    case Family::DirichletCategorical:
      spec.params = DirichletParams{std::vector<double>(std::max<std::size_t>(2, info.labels.size()), 1.0)};
      break;
    case Family::BetaBernoulli: spec.params = BetaParams{}; break;
    case Family::NormalWithNormalInvGammaPrior: spec.params = NormalParams{}; break;
    case Family::ShiftedExponentialWithGammaScale: spec.params = ShiftedExpParams{}; break;
    case Family::Poisson: spec.params = PoissonParams{}; break;
    case Family::TruncatedCauchy:
      spec.params = CauchyParams{};
      spec.support.min = -1.0;
      spec.support.max = 1.0;
      break;
    case Family::UniformContinuous: spec.params = UniformParams{}; break;
    case Family::UniformDiscrete: spec.params = UniformDiscreteParams{}; break;
  }
  return spec;
}

}  // namespace

std::span<const NodeInfo> node_catalog() {
  static const std::vector<NodeInfo> catalog = build_catalog();
  return catalog;
}

const NodeInfo* find_node_info(std::string_view id) {
  const auto nodes = node_catalog();
  const auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeInfo& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

const Registry& default_registry() {
  static const Registry registry = [] {
    std::vector<NodeRef> refs;
    for (const auto& info : node_catalog()) refs.push_back({info.id, info.parents, placeholder(info)});
    return Registry::build(std::move(refs));
  }();
  return registry;
}

}  // namespace docsynth
