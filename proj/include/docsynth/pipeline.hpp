#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "docsynth/annotate.hpp"
#include "docsynth/corpus.hpp"
#include "docsynth/defects.hpp"
#include "docsynth/font.hpp"
#include "docsynth/image_io.hpp"
#include "docsynth/layout.hpp"
#include "docsynth/render.hpp"
#include "docsynth/templates.hpp"

namespace docsynth {

/// Rescales a page geometry to another resolution, keeping its physical size.
PageGeometry with_dpi(const PageGeometry& page, int dpi);

/// A loaded mixture with everything workers share read-only.
struct Generator {
  TemplateMixture mixture;
  std::vector<TemplateResources> resources;
  std::vector<FontSet> fonts;

  /// `template_path` names a preset or a template/mixture file. A `dpi`
  /// rescales every template's page.
  static Generator load(const std::filesystem::path& template_path, const std::string& language = "",
                        std::optional<int> dpi = std::nullopt);

  LayoutContext context(std::size_t template_index, TextEngine& text) const;
};

/// One document carried through the whole pipeline.
struct GeneratedDocument {
  DocumentPlan plan;
  ComposedDocument layout;
  DefectPlan defects;
  /// Empty when rendering was skipped.
  std::vector<Image> pages;
};

/// Per-worker state: glyph cache and renderer.
class Worker {
 public:
  explicit Worker(const Generator& gen) : gen_(&gen), renderer_(text_) {}

  /// Samples, composes, and unless `plan_only` renders and applies defects
  /// (when `defects` is set) to document `doc_index`.
  GeneratedDocument generate(std::uint64_t doc_index, std::uint64_t seed, bool defects, bool plan_only);

  TextEngine& text() noexcept { return text_; }

 private:
  const Generator* gen_;
  TextEngine text_;
  Renderer renderer_;
};

struct GenerateOptions {
  std::filesystem::path template_path = "scientific";
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out = "dataset";
  std::optional<int> dpi;
  std::string language;
  unsigned workers = 1;
  ImageFormat format = ImageFormat::Png;
  bool emit_plans = false;
  bool defects = true;
  /// Sample and lay out only: annotations and manifest without page images.
  bool plan_only = false;
};

struct GenerateSummary {
  std::uint64_t documents = 0;
  std::uint64_t pages = 0;
  std::uint64_t elements = 0;
  long long forced_breaks = 0;
  double seconds = 0.0;
};

/// Called from worker threads after each finished document with the number
/// done so far.
using ProgressFn = std::function<void(std::uint64_t done, std::uint64_t total)>;

/// Generates documents 0..count-1 on a fixed pool of workers and writes
///   images/{doc_id}_{page}.{png,jpg}, plans/{doc_id}.json (optional),
///   annotations.json and manifest.json
/// under `out`, then re-reads and verifies the dataset. Output bytes do not
/// depend on the worker count. The first failing document (lowest index)
/// decides the error that is rethrown.
GenerateSummary generate_dataset(const GenerateOptions& options, const ProgressFn& progress = {});

/// Record of a finished document for the annotation writer.
DocumentRecord make_record(const GeneratedDocument& doc, std::vector<std::string> page_files);

}  // namespace docsynth
