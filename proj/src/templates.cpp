#include "docsynth/templates.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "docsynth/catalog.hpp"
#include "docsynth/distributions.hpp"
#include "docsynth/error.hpp"

namespace docsynth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kMaxExtendsDepth = 8;

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

std::string absolutize(const fs::path& base_dir, const std::string& value) {
  fs::path p(value);
  if (p.is_relative()) p = base_dir / p;
  return p.lexically_normal().string();
}

void resolve_paths(json& j, const fs::path& dir) {
  for (const char* key : {"image_library", "qa_corpus"})
    if (auto it = j.find(key); it != j.end() && it->is_string()) *it = absolutize(dir, it->get<std::string>());
  auto langs = j.find("languages");
  if (langs == j.end() || !langs->is_object()) return;
  for (auto& [code, lang] : langs->items()) {
    if (!lang.is_object()) continue;
    for (const char* key : {"vocabulary", "sentences"})
      if (auto it = lang.find(key); it != lang.end() && it->is_string())
        *it = absolutize(dir, it->get<std::string>());
    if (auto fonts = lang.find("fonts"); fonts != lang.end() && fonts->is_array()) {
      for (auto& font : *fonts) {
        for (const char* key : {"regular", "bold", "italic", "bold_italic"})
          if (auto it = font.find(key); it != font.end() && it->is_string())
            *it = absolutize(dir, it->get<std::string>());
      }
    }
  }
}

// Merges `child` over `base`: node params and languages merge per key, the
// override lists concatenate, every other top-level field is replaced.
json merge_template_json(json base, const json& child) {
  for (const auto& [key, value] : child.items()) {
    if (key == "extends") continue;
    if ((key == "params" || key == "languages") && value.is_object() && base.contains(key) &&
        base[key].is_object()) {
      for (const auto& [id, entry] : value.items()) base[key][id] = entry;
    } else if (key == "overrides") {
      if (!base.contains("override_chain")) base["override_chain"] = json::array();
      base["override_chain"].push_back(value);
    } else {
      base[key] = value;
    }
  }
  return base;
}

// Reads a template document with all relative paths resolved and any
// "extends" chain flattened.
json load_template_json(const json& raw, const fs::path& dir, int depth) {
  if (!raw.is_object()) throw Error(ErrorCode::ParseError, "template must be a JSON object");
  if (depth > kMaxExtendsDepth) throw Error(ErrorCode::ParseError, "template 'extends' chain too deep");
  json doc = raw;
  resolve_paths(doc, dir);
  json merged = json::object();
  if (auto ext = doc.find("extends"); ext != doc.end()) {
    if (!ext->is_string()) throw Error(ErrorCode::ParseError, "'extends' must be a string");
    const fs::path base_path = fs::path(absolutize(dir, ext->get<std::string>()));
    merged = load_template_json(read_json_file(base_path), base_path.parent_path(), depth + 1);
  }
  return merge_template_json(std::move(merged), doc);
}

const json& require(const json& j, const char* key, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::ParseError, context + ": missing '" + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key, const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_string()) throw Error(ErrorCode::ParseError, context + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

int require_int(const json& j, const char* key, const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_number_integer()) throw Error(ErrorCode::ParseError, context + ": '" + key + "' must be an integer");
  return v.get<int>();
}

Rgb parse_color(const json& v, const std::string& context) {
  if (v.is_string())
    if (auto c = parse_hex_color(v.get<std::string>())) return *c;
  throw Error(ErrorCode::ParseError, context + ": expected a \"#RRGGBB\" color");
}

std::vector<Rgb> parse_color_list(const json& palettes, const char* key) {
  const std::string context = std::string("palettes.") + key;
  const json& list = require(palettes, key, "palettes");
  if (!list.is_array()) throw Error(ErrorCode::ParseError, context + ": expected an array");
  std::vector<Rgb> out;
  for (std::size_t i = 0; i < list.size(); ++i)
    out.push_back(parse_color(list[i], context + "[" + std::to_string(i) + "]"));
  return out;
}

std::size_t count_nonempty_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnresolvedResource, "cannot read " + path.string());
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ++n;
  }
  return n;
}

std::size_t category_count(const NodeInfo& info, const TemplateSpec& spec) {
  switch (info.categories) {
    case CategorySource::Fixed: return info.labels.size();
    case CategorySource::BackgroundPalette: return spec.palettes.background.size();
    case CategorySource::TextPalette: return spec.palettes.text.size();
    case CategorySource::FillPalette: return spec.palettes.fill.size();
    case CategorySource::AccentPalette: return spec.palettes.accent.size();
    case CategorySource::Fonts: return spec.fonts.size();
    case CategorySource::Vocabulary: return spec.corpus.vocabulary_size;
    case CategorySource::None:
    case CategorySource::Templates: break;
  }
  return 0;
}

ParamTable parse_params(const json& j, const TemplateSpec& partial, std::string_view source) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, std::string(source) + ": 'params' must be an object");
  ParamTable table;
  for (const auto& [id, entry] : j.items()) {
    const NodeInfo* info = find_node_info(id);
    if (info == nullptr || !info->per_template)
      throw Error(ErrorCode::ParseError, std::string(source) + ": unknown node id '" + id + "'");
    json e = entry;
    // A symmetric Dirichlet without an explicit size takes the size of the
    // node's category set.
    if (e.is_object() && e.contains("symmetric") && !e.contains("dim") && !e.contains("alpha"))
      e["dim"] = category_count(*info, partial);
    table.emplace(id, spec_from_json(e, id));
  }
  return table;
}

TemplateSpec parse_template(const json& doc, const LoadOptions& options, const std::string& source) {
  TemplateSpec spec;
  const std::string schema = doc.value("schema", std::string("docsynth.template/1"));
  if (schema != "docsynth.template/1")
    throw Error(ErrorCode::ParseError, source + ": unsupported schema '" + schema + "'");
  spec.template_id = require_string(doc, "template_id", source);
  spec.display_name = doc.value("display_name", spec.template_id);

  if (auto page = doc.find("page"); page != doc.end()) {
    spec.page.width_px = require_int(*page, "width_px", source + ": page");
    spec.page.height_px = require_int(*page, "height_px", source + ": page");
    spec.page.dpi = require_int(*page, "dpi", source + ": page");
  }

  const json& languages = require(doc, "languages", source);
  std::string code = options.language.empty() ? require_string(doc, "default_language", source) : options.language;
  auto lang = languages.find(code);
  if (lang == languages.end())
    throw Error(ErrorCode::UnresolvedResource, source + ": language '" + code + "' is not configured");
  spec.corpus.language = code;
  spec.corpus.vocabulary = require_string(*lang, "vocabulary", source + ": languages." + code);
  spec.corpus.sentences = require_string(*lang, "sentences", source + ": languages." + code);
  if (!fs::is_regular_file(spec.corpus.vocabulary))
    throw Error(ErrorCode::UnresolvedResource, "vocabulary file not found: " + spec.corpus.vocabulary.string());
  spec.corpus.vocabulary_size = count_nonempty_lines(spec.corpus.vocabulary);
  const json& fonts = require(*lang, "fonts", source + ": languages." + code);
  if (!fonts.is_array()) throw Error(ErrorCode::ParseError, source + ": fonts must be an array");
  for (const auto& f : fonts) {
    const std::string ctx = source + ": font";
    FontFamilyFiles files;
    files.name = require_string(f, "name", ctx);
    files.regular = require_string(f, "regular", ctx);
    // Missing style variants fall back to the regular face.
    files.bold = f.value("bold", files.regular.string());
    files.italic = f.value("italic", files.regular.string());
    files.bold_italic = f.value("bold_italic", files.bold.string());
    spec.fonts.push_back(std::move(files));
  }

  spec.image_library = require_string(doc, "image_library", source);

  const json& palettes = require(doc, "palettes", source);
  spec.palettes.background = parse_color_list(palettes, "background");
  spec.palettes.text = parse_color_list(palettes, "text");
  spec.palettes.accent = parse_color_list(palettes, "accent");
  spec.palettes.chart = parse_color_list(palettes, "chart");
  const json& fill = require(palettes, "fill", "palettes");
  if (!fill.is_array()) throw Error(ErrorCode::ParseError, "palettes.fill: expected an array");
  for (std::size_t i = 0; i < fill.size(); ++i) {
    if (fill[i] == "none")
      spec.palettes.fill.emplace_back(std::nullopt);
    else
      spec.palettes.fill.emplace_back(parse_color(fill[i], "palettes.fill[" + std::to_string(i) + "]"));
  }

  if (auto wm = doc.find("watermark_texts"); wm != doc.end()) spec.watermark_texts = wm->get<std::vector<std::string>>();

  const std::string content = doc.value("table_content", std::string("tokens"));
  if (content == "tokens") {
    spec.table_content = TableContent::Tokens;
  } else if (content == "qa_pairs") {
    spec.table_content = TableContent::QaPairs;
    spec.qa_corpus = require_string(doc, "qa_corpus", source);
  } else {
    throw Error(ErrorCode::ParseError, source + ": table_content must be 'tokens' or 'qa_pairs'");
  }

  spec.params = parse_params(require(doc, "params", source), spec, source);

  if (auto chain = doc.find("override_chain"); chain != doc.end())
    for (const auto& overrides : *chain) spec = apply_preset_overrides(spec, overrides);
  return spec;
}

void require_readable(const fs::path& path, const std::string& what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw Error(ErrorCode::UnresolvedResource, what + " not found: " + path.string());
}

double support_bound(const DistributionSpec& spec, bool upper) {
  const auto& bound = upper ? spec.support.max : spec.support.min;
  return bound ? *bound : (upper ? HUGE_VAL : -HUGE_VAL);
}

}  // namespace

void validate_template(const TemplateSpec& spec) {
  const std::string& id = spec.template_id;
  if (spec.page.width_px <= 0 || spec.page.height_px <= 0)
    throw Error(ErrorCode::ParseError, id + ": page dimensions must be positive");
  if (spec.page.dpi < 50 || spec.page.dpi > 600)
    throw Error(ErrorCode::ParseError, id + ": page.dpi must lie in [50, 600]");

  std::vector<std::string> missing;
  for (const auto& info : node_catalog())
    if (info.per_template && !spec.params.contains(info.id)) missing.push_back(info.id);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorCode::MissingNodeParams, id + ": missing parameters for " + list);
  }

  for (const auto& [node_id, dist] : spec.params) {
    const NodeInfo* info = find_node_info(node_id);
    if (info == nullptr) throw Error(ErrorCode::ParseError, id + ": unknown node id '" + node_id + "'");
    if (dist.family() != info->family)
      throw Error(ErrorCode::InvalidHyperparam, node_id + ": expected family " + std::string(to_string(info->family)) +
                                                    ", got " + std::string(to_string(dist.family())));
    dist.validate(node_id);
    if (info->family == Family::DirichletCategorical) {
      const auto& alpha = std::get<DirichletParams>(dist.params).alpha;
      const std::size_t expected = category_count(*info, spec);
      if (alpha.size() != expected)
        throw Error(ErrorCode::DimensionMismatch, node_id + ": " + std::to_string(alpha.size()) +
                                                      " concentrations for " + std::to_string(expected) +
                                                      " categories");
    }
  }

  const auto& margin = spec.params.at("margin");
  if (!(support_bound(margin, false) > 0.0) || !(support_bound(margin, true) < 0.45))
    throw Error(ErrorCode::InvalidHyperparam, "margin: support must lie inside (0, 0.45)");
  if (!(std::get<ShiftedExpParams>(spec.params.at("font.size").params).theta > 0.0))
    throw Error(ErrorCode::InvalidHyperparam, "font.size.theta must be positive");
  for (const char* node : {"elements.count", "table.rows"})
    if (!(support_bound(spec.params.at(node), false) >= 1.0))
      throw Error(ErrorCode::InvalidHyperparam, std::string(node) + ": support minimum must be at least 1");
  const auto& caption_lines = std::get<UniformDiscreteParams>(spec.params.at("caption.lines").params);
  if (caption_lines.lo < 1 || caption_lines.hi > 3)
    throw Error(ErrorCode::InvalidHyperparam, "caption.lines must lie within [1, 3]");
  for (const char* node : {"paragraph.lines", "bullet.lines", "equation.groups", "figure.points", "header.title_words",
                           "footer.title_words"}) {
    if (std::get<UniformDiscreteParams>(spec.params.at(node).params).lo < 1)
      throw Error(ErrorCode::InvalidHyperparam, std::string(node) + ".lo must be at least 1");
  }

  const auto& wm = std::get<UniformDiscreteParams>(spec.params.at("defects.watermark.text").params);
  if (spec.watermark_texts.empty() || wm.lo < 0 || wm.hi >= static_cast<std::int64_t>(spec.watermark_texts.size()))
    throw Error(ErrorCode::InvalidHyperparam, "defects.watermark.text must index into watermark_texts");

  if (spec.palettes.background.empty() || spec.palettes.text.empty() || spec.palettes.fill.empty() ||
      spec.palettes.accent.empty() || spec.palettes.chart.empty())
    throw Error(ErrorCode::ParseError, id + ": every palette needs at least one color");
  if (spec.fonts.empty()) throw Error(ErrorCode::ParseError, id + ": no fonts configured");
  if (spec.corpus.vocabulary_size == 0)
    throw Error(ErrorCode::UnresolvedResource, "vocabulary is empty: " + spec.corpus.vocabulary.string());

  require_readable(spec.corpus.vocabulary, "vocabulary");
  require_readable(spec.corpus.sentences, "sentence corpus");
  for (const auto& font : spec.fonts)
    for (const auto* face : {&font.regular, &font.bold, &font.italic, &font.bold_italic})
      require_readable(*face, "font file");
  std::error_code ec;
  if (!fs::is_directory(spec.image_library, ec))
    throw Error(ErrorCode::UnresolvedResource, "image library not found: " + spec.image_library.string());
  if (spec.table_content == TableContent::QaPairs) require_readable(spec.qa_corpus, "question/answer corpus");
}

TemplateMixture load_mixture(const fs::path& path, const LoadOptions& options) {
  const json root = read_json_file(path);
  const fs::path dir = path.parent_path();
  TemplateMixture mixture;

  auto load_entry = [&](const json& raw, const fs::path& entry_dir, const std::string& source) {
    TemplateSpec spec = parse_template(load_template_json(raw, entry_dir, 0), options, source);
    validate_template(spec);
    return spec;
  };

  if (root.is_object() && root.contains("templates")) {
    const std::string schema = root.value("schema", std::string("docsynth.mixture/1"));
    if (schema != "docsynth.mixture/1")
      throw Error(ErrorCode::ParseError, path.string() + ": unsupported schema '" + schema + "'");
    const json& entries = root["templates"];
    if (!entries.is_array() || entries.empty())
      throw Error(ErrorCode::ParseError, path.string() + ": 'templates' must be a non-empty array");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const json& entry = entries[i];
      const std::string source = path.string() + ": templates[" + std::to_string(i) + "]";
      TemplateSpec spec;
      if (entry.contains("file")) {
        const fs::path file = absolutize(dir, entry["file"].get<std::string>());
        spec = load_entry(read_json_file(file), file.parent_path(), file.string());
      } else {
        spec = load_entry(entry, dir, source);
      }
      if (auto ov = entry.find("overrides"); entry.contains("file") && ov != entry.end()) {
        spec = apply_preset_overrides(spec, *ov);
        validate_template(spec);
      }
      if (auto tid = entry.find("template_id"); entry.contains("file") && tid != entry.end())
        spec.template_id = tid->get<std::string>();
      mixture.templates.push_back(std::move(spec));
    }
    const json& alpha = require(root, "alpha", path.string());
    if (!alpha.is_array()) throw Error(ErrorCode::ParseError, path.string() + ": 'alpha' must be an array");
    for (const auto& a : alpha) {
      if (!a.is_number()) throw Error(ErrorCode::ParseError, path.string() + ": non-numeric alpha");
      mixture.alpha.push_back(a.get<double>());
    }
  } else {
    mixture.templates.push_back(load_entry(root, dir, path.string()));
    mixture.alpha = {1.0};
  }

  if (mixture.alpha.size() != mixture.templates.size())
    throw Error(ErrorCode::DimensionMismatch, path.string() + ": " + std::to_string(mixture.alpha.size()) +
                                                  " concentrations for " + std::to_string(mixture.templates.size()) +
                                                  " templates");
  for (std::size_t i = 0; i < mixture.alpha.size(); ++i)
    if (!(mixture.alpha[i] > 0.0) || !std::isfinite(mixture.alpha[i]))
      throw Error(ErrorCode::InvalidHyperparam, "template.alpha[" + std::to_string(i) + "] must be positive");
  return mixture;
}

TemplateChoice choose_template(const TemplateMixture& mixture, RngStream& rng) {
  TemplateChoice choice;
  choice.probabilities = dist::dirichlet(rng, mixture.alpha);
  choice.index = dist::categorical(rng, choice.probabilities);
  return choice;
}

TemplateSpec apply_preset_overrides(const TemplateSpec& base, const json& overrides) {
  TemplateSpec out = base;
  if (overrides.is_null()) return out;
  if (!overrides.is_object()) throw Error(ErrorCode::UnknownOverrideKey, "overrides must be an object of node ids");
  for (const auto& [node_id, fields] : overrides.items()) {
    auto it = out.params.find(node_id);
    if (it == out.params.end()) throw Error(ErrorCode::UnknownOverrideKey, node_id);
    if (!fields.is_object()) throw Error(ErrorCode::UnknownOverrideKey, node_id + ": expected an object of fields");
    json current = to_json(it->second);
    std::set<std::string> allowed{"min", "max", "integer", "unit"};
    for (const auto& [key, value] : current.items())
      if (key != "family") allowed.insert(key);
    const bool dirichlet = it->second.family() == Family::DirichletCategorical;
    if (dirichlet) allowed.insert("symmetric");
    for (const auto& [field, value] : fields.items()) {
      if (!allowed.contains(field)) throw Error(ErrorCode::UnknownOverrideKey, node_id + "." + field);
      if (field == "symmetric") {
        current["dim"] = std::get<DirichletParams>(it->second.params).alpha.size();
        current.erase("alpha");
      }
      current[field] = value;
    }
    DistributionSpec updated = spec_from_json(current, node_id);
    updated.validate(node_id);
    it->second = std::move(updated);
  }
  return out;
}

nlohmann::ordered_json params_to_json(const ParamTable& params) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& info : node_catalog())
    if (auto it = params.find(info.id); it != params.end()) out[info.id] = to_json(it->second);
  for (const auto& [id, spec] : params)
    if (!out.contains(id)) out[id] = to_json(spec);
  return out;
}

ParamTable params_from_json(const json& j, std::string_view source) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, std::string(source) + ": expected an object of node ids");
  ParamTable table;
  for (const auto& [id, entry] : j.items()) table.emplace(id, spec_from_json(entry, id));
  return table;
}

fs::path resource_dir() {
  if (const char* env = std::getenv("DOCSYNTH_RESOURCES"); env != nullptr && *env != '\0') return env;
  return DOCSYNTH_RESOURCE_DIR;
}

fs::path resolve_template_path(const std::string& name_or_path) {
  std::error_code ec;
  if (fs::is_regular_file(name_or_path, ec)) return name_or_path;
  const fs::path bundled = resource_dir() / "templates" / (name_or_path + ".json");
  if (fs::is_regular_file(bundled, ec)) return bundled;
  return name_or_path;
}

}  // namespace docsynth
