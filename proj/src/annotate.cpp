#include "docsynth/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "docsynth/error.hpp"
#include "docsynth/image_io.hpp"

namespace docsynth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double luminance(Rgb c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

json read_json(const std::filesystem::path& path, ErrorCode missing) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(missing, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

ordered_json categories_json() {
  ordered_json cats = ordered_json::array();
  for (int id = 1; id <= kCategoryCount; ++id)
    cats.push_back({{"id", id}, {"name", category_name(static_cast<Category>(id))}, {"supercategory", "layout"}});
  return cats;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

CategoryCounts count_categories(std::span<const LayoutElement> elements) {
  CategoryCounts c{};
  for (const auto& e : elements) ++c[static_cast<std::size_t>(static_cast<int>(e.category) - 1)];
  return c;
}

std::string format_doc_id(std::uint64_t doc_index) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(doc_index));
  return buf;
}

std::map<std::string, std::vector<double>> plan_variables(const DocumentPlan& plan) {
  std::map<std::string, std::vector<double>> v;
  auto add = [&](const std::string& name, double x) { v[name].push_back(x); };
  auto style = [&](const std::string& prefix, const HeadingStyle& s) {
    add(prefix + ".font_style", static_cast<int>(s.font_style));
    add(prefix + ".align", static_cast<int>(s.align));
    add(prefix + ".color_luminance", luminance(s.fore_color));
  };
  auto words = [&](const std::string& name, const std::vector<TokenLine>& lines) {
    for (const auto& l : lines) add(name, static_cast<double>(l.size()));
  };

  add("document.columns", plan.columns);
  add("document.font_size_pt", plan.font_size_pt);
  add("document.margin", plan.margin);
  add("document.text_luminance", luminance(plan.text_color));
  add("document.background_luminance", luminance(plan.background));
  add("document.elements", static_cast<double>(plan.body.size()));
  if (plan.title) {
    style("title", plan.title->style);
    words("title.words_per_line", plan.title->lines);
  }
  style("section", plan.section_style);
  for (const auto& e : plan.body) {
    if (const auto* s = std::get_if<SectionPlan>(&e)) {
      words("section.words_per_line", s->lines);
    } else if (const auto* t = std::get_if<TablePlan>(&e)) {
      add("table.rows", t->rows);
      add("table.cols", t->cols);
      add("table.h_pad", t->h_pad);
      add("table.v_pad", t->v_pad);
      add("table.align", static_cast<int>(t->align));
      add("table.borders", static_cast<int>(t->borders));
      if (t->caption) words("caption.words_per_line", t->caption->lines);
    } else if (const auto* f = std::get_if<FigurePlan>(&e)) {
      add("figure.source", static_cast<int>(f->source));
      if (f->caption) words("caption.words_per_line", f->caption->lines);
    } else if (const auto* p = std::get_if<ParagraphPlan>(&e)) {
      add("paragraph.line_count", p->line_count);
      add("paragraph.line_spacing", p->line_spacing);
    } else if (const auto* b = std::get_if<BulletPlan>(&e)) {
      add("bullet.items", static_cast<double>(b->items.size()));
      add("bullet.type", static_cast<int>(b->type));
    } else if (const auto* q = std::get_if<EquationPlan>(&e)) {
      add("equation.groups", static_cast<double>(q->groups.size()));
    }
  }
  return v;
}

ordered_json annotations_json(std::span<const DocumentRecord> docs) {
  ordered_json images = ordered_json::array();
  ordered_json anns = ordered_json::array();
  long long image_id = 0;
  long long ann_id = 0;
  for (const auto& d : docs) {
    const long long first_image = image_id + 1;
    for (std::size_t p = 0; p < d.pages.size(); ++p) {
      ++image_id;
      images.push_back({{"id", image_id},
                        {"file_name", p < d.page_files.size() ? d.page_files[p] : std::string()},
                        {"width", d.pages[p].width},
                        {"height", d.pages[p].height},
                        {"doc_id", d.doc_id},
                        {"page", p}});
    }
    const long long first_ann = ann_id + 1;
    for (const auto& e : d.elements) {
      ++ann_id;
      ordered_json a;
      a["id"] = ann_id;
      a["image_id"] = first_image + e.page;
      a["category_id"] = static_cast<int>(e.category);
      a["bbox"] = {static_cast<double>(e.box.x), static_cast<double>(e.box.y), static_cast<double>(e.box.w),
                   static_cast<double>(e.box.h)};
      a["area"] = static_cast<double>(e.box.area());
      a["iscrowd"] = 0;
      a["element_id"] = e.element_id;
      a["parent_id"] = e.parent_id < 0 ? ordered_json(nullptr) : ordered_json(first_ann + e.parent_id);
      a["plan_index"] = e.plan_index;
      anns.push_back(std::move(a));
    }
  }
  ordered_json out;
  out["info"] = {{"description", "synthetic document layouts"},
                 {"generator", kGeneratorName},
                 {"version", kGeneratorVersion},
                 {"schema_version", kManifestSchemaVersion}};
  out["images"] = std::move(images);
  out["annotations"] = std::move(anns);
  out["categories"] = categories_json();
  return out;
}

std::vector<DocumentRecord> parse_annotations(const json& j) {
  std::vector<DocumentRecord> docs;
  try {
    struct ImageRef {
      std::size_t doc;
      int page;
    };
    std::unordered_map<long long, ImageRef> images;
    for (const auto& im : j.at("images")) {
      const auto doc_id = im.at("doc_id").get<std::string>();
      if (docs.empty() || docs.back().doc_id != doc_id) {
        docs.emplace_back();
        docs.back().doc_id = doc_id;
      }
      auto& d = docs.back();
      const int page = im.at("page").get<int>();
      if (page != static_cast<int>(d.pages.size()))
        throw Error(ErrorCode::ParseError, "pages of " + doc_id + " are not in order");
      d.pages.push_back({im.at("width").get<int>(), im.at("height").get<int>(), kWhite});
      d.page_files.push_back(im.at("file_name").get<std::string>());
      images.emplace(im.at("id").get<long long>(), ImageRef{docs.size() - 1, page});
    }
    std::unordered_map<long long, int> element_of;
    struct PendingParent {
      std::size_t doc;
      std::size_t element;
      long long parent;
    };
    std::vector<PendingParent> parents;
    for (const auto& a : j.at("annotations")) {
      const auto image = images.find(a.at("image_id").get<long long>());
      if (image == images.end()) throw Error(ErrorCode::ParseError, "annotation references an unknown image");
      auto& d = docs[image->second.doc];
      LayoutElement e;
      const int cat = a.at("category_id").get<int>();
      if (cat < 1 || cat > kCategoryCount) throw Error(ErrorCode::ParseError, "unknown category id " + std::to_string(cat));
      e.category = static_cast<Category>(cat);
      e.page = image->second.page;
      const auto& b = a.at("bbox");
      e.box = {static_cast<int>(b.at(0).get<double>()), static_cast<int>(b.at(1).get<double>()),
               static_cast<int>(b.at(2).get<double>()), static_cast<int>(b.at(3).get<double>())};
      e.element_id = a.at("element_id").get<int>();
      e.plan_index = a.at("plan_index").get<int>();
      element_of.emplace(a.at("id").get<long long>(), e.element_id);
      if (!a.at("parent_id").is_null())
        parents.push_back({image->second.doc, d.elements.size(), a.at("parent_id").get<long long>()});
      d.elements.push_back(e);
    }
    // A caption placed above its table precedes its parent.
    for (const auto& p : parents) {
      const auto parent = element_of.find(p.parent);
      if (parent == element_of.end()) throw Error(ErrorCode::ParseError, "unknown parent annotation");
      docs[p.doc].elements[p.element].parent_id = parent->second;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("annotation file: ") + e.what());
  }
  for (auto& d : docs) d.counts = count_categories(d.elements);
  return docs;
}

ordered_json manifest_json(std::span<const DocumentRecord> docs) {
  ordered_json list = ordered_json::array();
  for (const auto& d : docs) {
    ordered_json counts = ordered_json::object();
    for (int id = 1; id <= kCategoryCount; ++id)
      counts[std::string(category_name(static_cast<Category>(id)))] = d.counts[static_cast<std::size_t>(id - 1)];
    ordered_json vars = ordered_json::object();
    for (const auto& [name, values] : d.variables) vars[name] = values;
    list.push_back({{"doc_id", d.doc_id},
                    {"doc_index", d.doc_index},
                    {"template_id", d.template_id},
                    {"seed", d.seed},
                    {"pages", d.page_files},
                    {"annotation_counts", std::move(counts)},
                    {"variables", std::move(vars)}});
  }
  ordered_json out;
  out["schema_version"] = kManifestSchemaVersion;
  out["generator"] = {{"name", kGeneratorName}, {"version", kGeneratorVersion}};
  out["annotation_file"] = kAnnotationFile;
  out["categories"] = categories_json();
  out["documents"] = std::move(list);
  return out;
}

std::vector<DocumentRecord> parse_manifest(const json& j) {
  std::vector<DocumentRecord> docs;
  try {
    if (j.at("schema_version").get<int>() != kManifestSchemaVersion)
      throw Error(ErrorCode::ParseError, "unsupported manifest schema version");
    for (const auto& m : j.at("documents")) {
      DocumentRecord d;
      d.doc_id = m.at("doc_id").get<std::string>();
      d.doc_index = m.at("doc_index").get<std::uint64_t>();
      d.template_id = m.at("template_id").get<std::string>();
      d.seed = m.at("seed").get<std::uint64_t>();
      d.page_files = m.at("pages").get<std::vector<std::string>>();
      for (const auto& [name, count] : m.at("annotation_counts").items())
        d.counts[static_cast<std::size_t>(static_cast<int>(category_from_name(name)) - 1)] = count.get<long long>();
      for (const auto& [name, values] : m.at("variables").items())
        d.variables[name] = values.get<std::vector<double>>();
      docs.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("manifest: ") + e.what());
  }
  return docs;
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

void export_annotations(std::span<const DocumentRecord> docs, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_file_atomic(dir / kAnnotationFile, dump_json(annotations_json(docs)));
  write_file_atomic(dir / kManifestFile, dump_json(manifest_json(docs)));
}

std::vector<DocumentRecord> load_dataset(const std::filesystem::path& dir) {
  auto docs = parse_manifest(read_json(dir / kManifestFile, ErrorCode::MissingManifest));
  const auto ann = parse_annotations(read_json(dir / kAnnotationFile, ErrorCode::IoError));
  std::unordered_map<std::string, const DocumentRecord*> by_id;
  for (const auto& a : ann) by_id.emplace(a.doc_id, &a);
  for (auto& d : docs) {
    const auto it = by_id.find(d.doc_id);
    if (it == by_id.end()) throw Error(ErrorCode::ParseError, "no annotations for document " + d.doc_id);
    d.pages = it->second->pages;
    d.elements = it->second->elements;
    if (count_categories(d.elements) != d.counts)
      throw Error(ErrorCode::ParseError, "annotation counts of " + d.doc_id + " disagree with the manifest");
  }
  return docs;
}

void verify_dataset(const std::filesystem::path& dir) {
  const json manifest = read_json(dir / kManifestFile, ErrorCode::MissingManifest);
  int expect = 1;
  for (const auto& c : manifest.at("categories"))
    if (c.at("id").get<int>() != expect++) throw Error(ErrorCode::ParseError, "category ids are not dense from 1");
  for (const auto& d : load_dataset(dir))
    for (const auto& f : d.page_files)
      if (!std::filesystem::is_regular_file(dir / f)) throw Error(ErrorCode::ParseError, "missing page file " + f);
}

double overlap_index(std::span<const LayoutElement> elements) {
  long long total = 0;
  long long shared = 0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& a = elements[i];
    if (a.category == Category::TableCell) continue;
    total += a.box.area();
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      const auto& b = elements[j];
      if (b.category == Category::TableCell || b.page != a.page) continue;
      shared += intersect(a.box, b.box).area();
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(total);
}

double alignment_index(std::span<const LayoutElement> elements, std::span<const PageInfo> pages) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& a = elements[i];
    if (a.category == Category::TableCell) continue;
    const double ga[3] = {static_cast<double>(a.box.x), a.box.x + a.box.w / 2.0, static_cast<double>(a.box.right())};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < elements.size(); ++j) {
      const auto& b = elements[j];
      if (j == i || b.category == Category::TableCell || b.page != a.page) continue;
      const double gb[3] = {static_cast<double>(b.box.x), b.box.x + b.box.w / 2.0, static_cast<double>(b.box.right())};
      for (int g = 0; g < 3; ++g) best = std::min(best, std::abs(ga[g] - gb[g]));
    }
    if (!std::isfinite(best)) continue;
    const auto page = static_cast<std::size_t>(a.page);
    const double width = page < pages.size() && pages[page].width > 0 ? pages[page].width : 1.0;
    sum += best / width;
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

DatasetMetrics dataset_metrics(std::span<const DocumentRecord> docs) {
  DatasetMetrics m;
  m.documents = docs.size();
  if (docs.empty()) return m;
  for (const auto& d : docs) {
    m.overlap_index += overlap_index(d.elements);
    m.alignment_index += alignment_index(d.elements, d.pages);
    m.elements_per_document += static_cast<double>(d.elements.size());
  }
  const auto n = static_cast<double>(docs.size());
  m.overlap_index /= n;
  m.alignment_index /= n;
  m.elements_per_document /= n;
  return m;
}

DatasetStats dataset_stats(std::span<const DocumentRecord> docs) {
  DatasetStats s;
  s.documents = docs.size();
  for (int id = 1; id <= kCategoryCount; ++id) {
    CategoryRow row{static_cast<Category>(id), 0, 0};
    for (const auto& d : docs) {
      const long long c = d.counts[static_cast<std::size_t>(id - 1)];
      row.instances += c;
      row.documents += c > 0;
    }
    s.categories.push_back(row);
  }

  std::map<std::string, std::vector<double>> pooled;
  for (const auto& d : docs)
    for (const auto& [name, values] : d.variables) pooled[name].insert(pooled[name].end(), values.begin(), values.end());
  for (const auto& [name, values] : pooled) {
    if (values.empty()) continue;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const bool integral = std::all_of(values.begin(), values.end(), [](double v) { return v == std::floor(v); });
    if (integral && hi - lo < 64) {
      const int n = static_cast<int>(hi - lo) + 1;
      std::vector<long long> counts(static_cast<std::size_t>(n));
      for (const double v : values) ++counts[static_cast<std::size_t>(v - lo)];
      for (int b = 0; b < n; ++b) s.histograms.push_back({name, lo + b, lo + b + 1, counts[static_cast<std::size_t>(b)]});
      continue;
    }
    constexpr int kBins = 20;
    if (hi == lo) {
      s.histograms.push_back({name, lo, hi, static_cast<long long>(values.size())});
      continue;
    }
    const double width = (hi - lo) / kBins;
    std::vector<long long> counts(kBins);
    for (const double v : values)
      ++counts[static_cast<std::size_t>(std::clamp(static_cast<int>((v - lo) / width), 0, kBins - 1))];
    for (int b = 0; b < kBins; ++b)
      s.histograms.push_back({name, lo + b * width, b + 1 == kBins ? hi : lo + (b + 1) * width, counts[static_cast<std::size_t>(b)]});
  }
  return s;
}

std::string categories_csv(const DatasetStats& stats) {
  std::ostringstream out;
  out << "category,category_id,documents,instances\n";
  for (const auto& r : stats.categories)
    out << category_name(r.category) << ',' << static_cast<int>(r.category) << ',' << r.documents << ',' << r.instances
        << '\n';
  return out.str();
}

std::string histograms_csv(const DatasetStats& stats) {
  std::ostringstream out;
  out << "variable,bin_low,bin_high,count\n";
  for (const auto& b : stats.histograms)
    out << b.variable << ',' << number(b.low) << ',' << number(b.high) << ',' << b.count << '\n';
  return out.str();
}

}  // namespace docsynth
