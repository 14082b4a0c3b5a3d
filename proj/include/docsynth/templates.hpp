#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "docsynth/color.hpp"
#include "docsynth/probnet.hpp"
#include "docsynth/rng.hpp"

namespace docsynth {

struct PageGeometry {
  int width_px = 1240;
  int height_px = 1754;
  int dpi = 150;
  bool operator==(const PageGeometry&) const = default;
};

struct FontFamilyFiles {
  std::string name;
  std::filesystem::path regular;
  std::filesystem::path bold;
  std::filesystem::path italic;
  std::filesystem::path bold_italic;
  bool operator==(const FontFamilyFiles&) const = default;
};

struct CorpusRef {
  std::string language;
  std::filesystem::path vocabulary;
  std::filesystem::path sentences;
  /// Resolved vocabulary size (non-empty lines of the vocabulary file).
  std::size_t vocabulary_size = 0;
  bool operator==(const CorpusRef&) const = default;
};

struct Palettes {
  std::vector<Rgb> background;
  std::vector<Rgb> text;
  /// nullopt is the "no fill" entry.
  std::vector<std::optional<Rgb>> fill;
  std::vector<Rgb> accent;
  std::vector<Rgb> chart;
  bool operator==(const Palettes&) const = default;
};

enum class TableContent { Tokens, QaPairs };

struct TemplateSpec {
  std::string template_id;
  std::string display_name;
  ParamTable params;
  CorpusRef corpus;
  std::vector<FontFamilyFiles> fonts;
  std::filesystem::path image_library;
  PageGeometry page;
  Palettes palettes;
  std::vector<std::string> watermark_texts;
  TableContent table_content = TableContent::Tokens;
  /// Tab-separated question/answer pairs; required when table_content is QaPairs.
  std::filesystem::path qa_corpus;

  bool operator==(const TemplateSpec&) const = default;
};

struct TemplateMixture {
  std::vector<double> alpha;
  std::vector<TemplateSpec> templates;

  std::size_t size() const noexcept { return templates.size(); }
};

struct LoadOptions {
  /// Language code to select from each template's language table; empty
  /// means the template's default language.
  std::string language;
};

/// Loads a mixture file or a single template file (which becomes a mixture
/// of one). Relative paths resolve against the file that mentions them.
TemplateMixture load_mixture(const std::filesystem::path& path, const LoadOptions& options = {});

/// Full validation of one template: node coverage against the catalog,
/// hyperparameter validity, category counts, page bounds and readable
/// resources.
void validate_template(const TemplateSpec& spec);

struct TemplateChoice {
  std::size_t index = 0;
  std::vector<double> probabilities;
};

TemplateChoice choose_template(const TemplateMixture& mixture, RngStream& rng);

/// `overrides` maps node ids to objects of hyperparameter fields, e.g.
/// {"header.present": {"a": 1e-9, "b": 1e6}}. Unknown ids or fields raise
/// UnknownOverrideKey. The base is not modified.
TemplateSpec apply_preset_overrides(const TemplateSpec& base, const nlohmann::json& overrides);

/// Serializes the parameter table in the template-file "params" layout.
nlohmann::ordered_json params_to_json(const ParamTable& params);
ParamTable params_from_json(const nlohmann::json& j, std::string_view source);

/// Directory holding the bundled fonts, images, corpora and presets.
std::filesystem::path resource_dir();
/// Resolves a bundled preset by name ("scientific", "resume", "forms",
/// "mixture") or returns the argument unchanged when it names a file.
std::filesystem::path resolve_template_path(const std::string& name_or_path);

}  // namespace docsynth
