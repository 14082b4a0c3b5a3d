#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "docsynth/layout.hpp"
#include "docsynth/plan.hpp"

namespace docsynth {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kGeneratorName = "docsynth";
inline constexpr const char* kGeneratorVersion = "0.3.0";
inline constexpr const char* kAnnotationFile = "annotations.json";
inline constexpr const char* kManifestFile = "manifest.json";

using CategoryCounts = std::array<long long, kCategoryCount>;

CategoryCounts count_categories(std::span<const LayoutElement> elements);

/// Everything recorded about one generated document. The manifest carries
/// the identity, files, counts and plan variables; the annotation file
/// carries page sizes and elements.
struct DocumentRecord {
  std::string doc_id;
  std::uint64_t doc_index = 0;
  std::string template_id;
  std::uint64_t seed = 0;
  /// Page image paths relative to the dataset root, one per page.
  std::vector<std::string> page_files;
  std::vector<PageInfo> pages;
  std::vector<LayoutElement> elements;
  /// Indexed by category id - 1.
  CategoryCounts counts{};
  /// Plan variables sampled for this document, for the histograms.
  std::map<std::string, std::vector<double>> variables;

  bool operator==(const DocumentRecord&) const = default;
};

/// "%06d" of the document index.
std::string format_doc_id(std::uint64_t doc_index);

/// Numeric plan variables worth a histogram: words per heading/caption line,
/// table shape and padding, font styles, alignments and colour luminance.
std::map<std::string, std::vector<double>> plan_variables(const DocumentPlan& plan);

// --- export -------------------------------------------------------------------------

/// COCO-style detection JSON: one image per page, annotations in document
/// then flow order. Beyond the COCO fields every annotation carries
/// `element_id`, `parent_id` (annotation id of the owning element or null)
/// and `plan_index`, and every image its `doc_id` and `page`.
nlohmann::ordered_json annotations_json(std::span<const DocumentRecord> docs);
/// Reconstructs doc ids, page sizes, files and elements. Throws
/// ParseError on malformed input.
std::vector<DocumentRecord> parse_annotations(const nlohmann::json& j);

nlohmann::ordered_json manifest_json(std::span<const DocumentRecord> docs);
/// Identity, files, counts and variables of each document.
std::vector<DocumentRecord> parse_manifest(const nlohmann::json& j);

/// Serialised form shared by every writer: two-space indent, trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

/// Writes the annotation file and the manifest into `dir` (atomically, each
/// through a temporary file). Throws IoError.
void export_annotations(std::span<const DocumentRecord> docs, const std::filesystem::path& dir);

/// Reads a dataset back: manifest plus annotations merged per document.
/// Throws MissingManifest when the manifest is absent.
std::vector<DocumentRecord> load_dataset(const std::filesystem::path& dir);

/// Checks that every page file of the manifest exists under `dir` and that
/// category ids are dense from 1. Throws ParseError naming the first
/// problem.
void verify_dataset(const std::filesystem::path& dir);

// --- metrics ------------------------------------------------------------------------

/// Sum over same-page pairs of intersection area divided by the sum of
/// element areas; table cells are excluded since they nest in their table.
double overlap_index(std::span<const LayoutElement> elements);

/// Mean over elements of min over the guides {left, x-centre, right} of the
/// distance to the nearest guide of the same kind on another element of the
/// page, divided by the page width. Cells are excluded; elements alone on
/// their page are skipped, and the index is 0 when none remain.
double alignment_index(std::span<const LayoutElement> elements, std::span<const PageInfo> pages);

struct DatasetMetrics {
  std::size_t documents = 0;
  double overlap_index = 0.0;
  double alignment_index = 0.0;
  double elements_per_document = 0.0;
};

/// Per-document metrics averaged over the dataset.
DatasetMetrics dataset_metrics(std::span<const DocumentRecord> docs);

// --- statistics ---------------------------------------------------------------------

struct CategoryRow {
  Category category = Category::Title;
  /// Documents with at least one instance.
  long long documents = 0;
  long long instances = 0;
};

struct HistogramBin {
  std::string variable;
  double low = 0.0;
  double high = 0.0;
  long long count = 0;
};

struct DatasetStats {
  std::size_t documents = 0;
  std::vector<CategoryRow> categories;
  std::vector<HistogramBin> histograms;
};

/// Integer-valued variables spanning at most 64 values get unit bins
/// [v, v + 1); others get 20 equal bins over their range, the last closed.
DatasetStats dataset_stats(std::span<const DocumentRecord> docs);

/// categories.csv and histograms.csv.
std::string categories_csv(const DatasetStats& stats);
std::string histograms_csv(const DatasetStats& stats);

}  // namespace docsynth
