// Command-line front end: generate, infer, stats, metrics, preview.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "docsynth/annotate.hpp"
#include "docsynth/catalog.hpp"
#include "docsynth/error.hpp"
#include "docsynth/image_io.hpp"
#include "docsynth/pipeline.hpp"
#include "docsynth/probnet.hpp"
#include "docsynth/templates.hpp"

using namespace docsynth;

namespace {

int report(const std::string& code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  return 2;
}

std::string message_of(const Error& e) {
  const std::string what = e.what();
  const auto prefix = std::string(to_string(e.code())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

// A distinct outline colour per category for preview overlays.
Rgb category_color(Category c) {
  static const Rgb colors[kCategoryCount] = {{230, 25, 75},  {60, 180, 75},  {0, 130, 200},  {245, 130, 48},
                                             {145, 30, 180}, {70, 240, 240}, {240, 50, 230}, {128, 128, 0},
                                             {0, 128, 128},  {170, 110, 40}};
  return colors[static_cast<int>(c) - 1];
}

void write_text(const std::filesystem::path& path, const std::string& text) { write_file_atomic(path, text); }

int run_generate(const GenerateOptions& opt) {
  const auto summary = generate_dataset(opt, [](std::uint64_t done, std::uint64_t total) {
    // Every 5%; each count is reported by exactly one worker.
    const std::uint64_t step = std::max<std::uint64_t>(1, total / 20);
    if (done % step == 0 || done == total)
      std::fprintf(stderr, "generated %llu/%llu\n", static_cast<unsigned long long>(done),
                   static_cast<unsigned long long>(total));
  });
  std::fprintf(stderr, "%llu documents, %llu pages, %llu elements in %.1f s\n",
               static_cast<unsigned long long>(summary.documents), static_cast<unsigned long long>(summary.pages),
               static_cast<unsigned long long>(summary.elements), summary.seconds);
  if (summary.forced_breaks > 0)
    std::fprintf(stderr, "%lld words were broken inside because they exceeded their line\n", summary.forced_breaks);
  return 0;
}

int run_infer(const std::string& template_file, const std::string& observations, const std::string& out) {
  const auto path = resolve_template_path(template_file);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnresolvedResource, "cannot open " + path.string());
  nlohmann::ordered_json raw;
  try {
    raw = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  const auto mixture = load_mixture(path);
  if (mixture.size() != 1) throw Error(ErrorCode::InvalidArgument, "infer takes a single template file, not a mixture");
  const auto& prior = mixture.templates[0].params;
  const auto data = load_observations(observations);
  const auto posterior = posterior_infer(data, default_registry(), prior);

  std::cout << "node,family,observations,prior,posterior\n";
  for (const auto& obs : data) {
    const auto& before = prior.at(obs.node_id);
    const auto& after = posterior.at(obs.node_id);
    std::cout << obs.node_id << ',' << to_string(before.family()) << ',' << obs.values.size() << ",\""
              << to_json(before).dump() << "\",\"" << to_json(after).dump() << "\"\n";
  }
  raw["params"] = params_to_json(posterior);
  write_text(out, raw.dump(2) + "\n");
  return 0;
}

int run_stats(const std::string& dataset, const std::string& out) {
  const auto docs = load_dataset(dataset);
  const auto stats = dataset_stats(docs);
  const std::filesystem::path dir = out.empty() ? std::filesystem::path(dataset) : std::filesystem::path(out);
  std::filesystem::create_directories(dir);
  write_text(dir / "categories.csv", categories_csv(stats));
  write_text(dir / "histograms.csv", histograms_csv(stats));
  std::cout << categories_csv(stats);
  std::fprintf(stderr, "%zu documents\n", stats.documents);
  return 0;
}

int run_metrics(const std::string& a, const std::string& b) {
  const auto ma = dataset_metrics(load_dataset(a));
  const auto mb = dataset_metrics(load_dataset(b));
  std::cout << "metric,a,b,difference\n";
  auto row = [](const char* name, double x, double y) {
    std::printf("%s,%.6f,%.6f,%.6f\n", name, x, y, std::abs(x - y));
  };
  row("Difference in Overlap Index", ma.overlap_index, mb.overlap_index);
  row("Difference in Alignment Index", ma.alignment_index, mb.alignment_index);
  row("Difference in Average Layout Elements", ma.elements_per_document, mb.elements_per_document);
  return 0;
}

int run_preview(const GenerateOptions& opt, std::uint64_t index, bool boxes) {
  const Generator gen = Generator::load(opt.template_path, opt.language, opt.dpi);
  Worker worker(gen);
  auto doc = worker.generate(index, opt.seed, opt.defects, false);
  if (boxes)
    for (const auto& e : doc.layout.elements)
      stroke_rect(doc.pages[static_cast<std::size_t>(e.page)], e.box, e.category == Category::TableCell ? 1 : 2,
                  category_color(e.category));
  std::filesystem::create_directories(opt.out);
  const char* ext = opt.format == ImageFormat::Png ? ".png" : ".jpg";
  for (std::size_t p = 0; p < doc.pages.size(); ++p) {
    const auto file = opt.out / (format_doc_id(index) + "_" + std::to_string(p) + ext);
    write_image(file, doc.pages[p], opt.format);
    std::cout << file.string() << '\n';
  }
  if (opt.emit_plans) write_text(opt.out / (format_doc_id(index) + ".json"), to_json(doc.plan).dump(2) + "\n");
  for (const auto& e : doc.layout.elements)
    std::fprintf(stderr, "page %d %-13s %5d %5d %5d %5d\n", e.page, std::string(category_name(e.category)).c_str(),
                 e.box.x, e.box.y, e.box.w, e.box.h);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic document layout generator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kGeneratorVersion);

  GenerateOptions opt;
  std::string template_name = "scientific";
  std::string out = "dataset";
  std::string format = "png";
  std::string defects = "on";
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<int> dpi;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--template", template_name, "Preset name or template/mixture file")->envname("DOCGEN_TEMPLATE");
    cmd->add_option("--seed", opt.seed, "Base seed")->envname("DOCGEN_SEED");
    cmd->add_option("--out", out, "Output directory")->envname("DOCGEN_OUT");
    cmd->add_option("--dpi", dpi, "Rescale pages to this resolution")->envname("DOCGEN_DPI")->check(CLI::Range(50, 600));
    cmd->add_option("--lang", opt.language, "Corpus language of the templates")->envname("DOCGEN_LANG");
    cmd->add_option("--format", format, "Image format")->envname("DOCGEN_FORMAT")->check(CLI::IsMember({"png", "jpeg"}));
    cmd->add_option("--defects", defects, "Apply sampled defects")->envname("DOCGEN_DEFECTS")->check(CLI::IsMember({"on", "off"}));
    cmd->add_flag("--emit-plans", opt.emit_plans, "Also write each document plan as JSON")->envname("DOCGEN_EMIT_PLANS");
  };

  auto* gen = app.add_subcommand("generate", "Generate an annotated dataset");
  common(gen);
  gen->add_option("--count", opt.count, "Number of documents")->envname("DOCGEN_COUNT");
  gen->add_option("--workers", workers, "Worker threads")->envname("DOCGEN_WORKERS")->check(CLI::Range(1, 256));
  gen->add_flag("--plan-only", opt.plan_only, "Sample and lay out without rendering images")->envname("DOCGEN_PLAN_ONLY");

  auto* preview = app.add_subcommand("preview", "Render one document, optionally with its boxes drawn");
  common(preview);
  std::uint64_t index = 0;
  bool boxes = false;
  preview->add_option("--index", index, "Document index");
  preview->add_flag("--boxes", boxes, "Outline every annotated element");

  auto* infer = app.add_subcommand("infer", "Update template hyperparameters from observations");
  std::string observations;
  std::string infer_out;
  infer->add_option("--template", template_name, "Template file")->required()->envname("DOCGEN_TEMPLATE");
  infer->add_option("--observations", observations, "Line-delimited JSON observations")->required();
  infer->add_option("--out", infer_out, "Posterior template file")->required();

  auto* stats = app.add_subcommand("stats", "Category table and variable histograms of a dataset");
  std::string dataset;
  std::string stats_out;
  stats->add_option("--dataset", dataset, "Dataset directory")->required();
  stats->add_option("--out", stats_out, "Directory for the CSV files (default: the dataset)");

  auto* metrics = app.add_subcommand("metrics", "Structural differences between two datasets");
  std::string a;
  std::string b;
  metrics->add_option("--a", a, "First dataset")->required();
  metrics->add_option("--b", b, "Second dataset")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(std::string(to_string(ErrorCode::InvalidArgument)), e.what());
  }

  opt.template_path = template_name;
  opt.out = out;
  opt.dpi = dpi;
  opt.workers = workers;
  opt.format = format == "png" ? ImageFormat::Png : ImageFormat::Jpeg;
  opt.defects = defects == "on";

  try {
    if (gen->parsed()) return run_generate(opt);
    if (preview->parsed()) return run_preview(opt, index, boxes);
    if (infer->parsed()) return run_infer(template_name, observations, infer_out);
    if (stats->parsed()) return run_stats(dataset, stats_out);
    if (metrics->parsed()) return run_metrics(a, b);
  } catch (const Error& e) {
    return report(std::string(to_string(e.code())), message_of(e));
  } catch (const std::exception& e) {
    return report("Internal", e.what());
  }
  return 0;
}
