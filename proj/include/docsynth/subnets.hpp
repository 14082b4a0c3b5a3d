#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "docsynth/corpus.hpp"
#include "docsynth/distributions.hpp"
#include "docsynth/plan.hpp"
#include "docsynth/templates.hpp"

namespace docsynth {

// Child indices of a document's root stream (seed, {doc_index}).
inline constexpr std::uint64_t kStreamTemplate = 0;
inline constexpr std::uint64_t kStreamRealize = 1;
inline constexpr std::uint64_t kStreamDocument = 2;
inline constexpr std::uint64_t kStreamTitle = 3;
inline constexpr std::uint64_t kStreamHeader = 4;
inline constexpr std::uint64_t kStreamFooter = 5;
inline constexpr std::uint64_t kStreamSectionStyle = 6;
inline constexpr std::uint64_t kStreamBody = 7;
inline constexpr std::uint64_t kStreamDefects = 9;
inline constexpr std::uint64_t kStreamElementBase = 100;

/// Per-document view of one template: holds the first-stage realization of
/// every node and draws observed values from it. Every instance of an
/// element in the document shares these realized parameters.
class NodeDrawer {
 public:
  /// Realizes every node of `spec` from `rng` (one child stream per node).
  NodeDrawer(const TemplateSpec& spec, const TemplateResources& resources, RngStream rng);

  double value(std::string_view id, RngStream& rng) const;
  std::size_t index(std::string_view id, RngStream& rng) const;
  bool flag(std::string_view id, RngStream& rng) const;
  std::uint32_t token(RngStream& rng) const { return static_cast<std::uint32_t>(vocabulary_table_(rng)); }
  TokenLine tokens(std::size_t count, RngStream& rng) const;

  const TemplateSpec& spec() const noexcept { return *spec_; }
  const TemplateResources& resources() const noexcept { return *resources_; }
  const std::map<std::string, Realized>& realized() const noexcept { return realized_; }
  const std::vector<double>& vocabulary_probs() const noexcept { return vocabulary_probs_; }

 private:
  const DistributionSpec& spec_of(std::string_view id) const;

  const TemplateSpec* spec_;
  const TemplateResources* resources_;
  std::map<std::string, Realized> realized_;
  std::vector<double> vocabulary_probs_;
  dist::CategoricalTable vocabulary_table_;
};

DocumentPlan sample_document_plan(const TemplateMixture& mixture, std::span<const TemplateResources> resources,
                                  std::uint64_t doc_index, std::uint64_t seed);

HeadingStyle sample_heading_style(const NodeDrawer& nodes, std::string_view prefix, RngStream& rng);
std::vector<TokenLine> sample_heading_lines(const NodeDrawer& nodes, std::string_view prefix, RngStream& rng);
SectionPlan sample_section(const NodeDrawer& nodes, RngStream& rng);
TitlePlan sample_title(const NodeDrawer& nodes, RngStream& rng);
TablePlan sample_table(const NodeDrawer& nodes, RngStream& rng);
FigurePlan sample_figure(const NodeDrawer& nodes, RngStream& rng);
CaptionPlan sample_caption(const NodeDrawer& nodes, RngStream& rng);
ParagraphPlan sample_paragraph(const NodeDrawer& nodes, RngStream& rng);
BulletPlan sample_bullet(const NodeDrawer& nodes, RngStream& rng);
EquationPlan sample_equation(const NodeDrawer& nodes, RngStream& rng);
/// `prefix` is "header" or "footer".
HeaderPlan sample_header(const NodeDrawer& nodes, std::string_view prefix, RngStream& rng);

}  // namespace docsynth
