#include "docsynth/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "docsynth/error.hpp"
#include "docsynth/subnets.hpp"

namespace docsynth {

PageGeometry with_dpi(const PageGeometry& page, int dpi) {
  if (dpi < 50 || dpi > 600) throw Error(ErrorCode::InvalidArgument, "dpi must lie in [50, 600]");
  const double k = static_cast<double>(dpi) / page.dpi;
  return {static_cast<int>(std::lround(page.width_px * k)), static_cast<int>(std::lround(page.height_px * k)), dpi};
}

Generator Generator::load(const std::filesystem::path& template_path, const std::string& language,
                          std::optional<int> dpi) {
  Generator g;
  g.mixture = load_mixture(resolve_template_path(template_path.string()), {language});
  if (dpi)
    for (auto& t : g.mixture.templates) t.page = with_dpi(t.page, *dpi);
  g.resources = load_resources(g.mixture);
  for (const auto& t : g.mixture.templates) g.fonts.push_back(load_font_set(t.fonts));
  return g;
}

LayoutContext Generator::context(std::size_t template_index, TextEngine& text) const {
  return {&mixture.templates.at(template_index), &resources.at(template_index), &fonts.at(template_index), &text};
}

GeneratedDocument Worker::generate(std::uint64_t doc_index, std::uint64_t seed, bool defects, bool plan_only) {
  GeneratedDocument doc;
  doc.plan = sample_document_plan(gen_->mixture, gen_->resources, doc_index, seed);
  const std::size_t t = doc.plan.template_index;
  doc.layout = compose(doc.plan, gen_->context(t, text_));
  doc.defects =
      sample_defect_plan(gen_->mixture.templates[t], doc.plan.realized, RngStream(seed, {doc_index}).child(kStreamDefects));
  if (plan_only) return doc;
  doc.pages = renderer_.render(doc.layout);
  if (defects) apply_defects(doc.pages, doc.defects, gen_->fonts[t]);
  return doc;
}

DocumentRecord make_record(const GeneratedDocument& doc, std::vector<std::string> page_files) {
  DocumentRecord r;
  r.doc_index = doc.plan.doc_index;
  r.doc_id = format_doc_id(r.doc_index);
  r.template_id = doc.plan.template_id;
  r.seed = doc.plan.seed;
  r.page_files = std::move(page_files);
  r.pages = doc.layout.pages;
  r.elements = doc.layout.elements;
  r.counts = count_categories(r.elements);
  r.variables = plan_variables(doc.plan);
  return r;
}

GenerateSummary generate_dataset(const GenerateOptions& options, const ProgressFn& progress) {
  const auto start = std::chrono::steady_clock::now();
  const Generator gen = Generator::load(options.template_path, options.language, options.dpi);

  const auto image_dir = options.out / "images";
  const auto plan_dir = options.out / "plans";
  std::error_code ec;
  std::filesystem::create_directories(options.out, ec);
  if (!options.plan_only) std::filesystem::create_directories(image_dir, ec);
  if (options.emit_plans) std::filesystem::create_directories(plan_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + options.out.string() + ": " + ec.message());

  const std::uint64_t count = options.count;
  std::vector<DocumentRecord> records(count);
  std::vector<long long> forced(count, 0);
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> done{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::uint64_t error_index = count;
  std::exception_ptr error;

  const char* ext = options.format == ImageFormat::Png ? ".png" : ".jpg";
  auto run = [&] {
    Worker worker(gen);
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        const auto doc = worker.generate(i, options.seed, options.defects, options.plan_only);
        const std::string id = format_doc_id(i);
        std::vector<std::string> files;
        for (std::size_t p = 0; p < doc.pages.size(); ++p) {
          const std::string name = id + "_" + std::to_string(p) + ext;
          write_image(image_dir / name, doc.pages[p], options.format);
          files.push_back("images/" + name);
        }
        if (options.emit_plans) write_file_atomic(plan_dir / (id + ".json"), to_json(doc.plan).dump(2) + "\n");
        records[i] = make_record(doc, std::move(files));
        forced[i] = doc.layout.forced_breaks;
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        failed = true;
        return;
      }
      const auto n = done.fetch_add(1) + 1;
      if (progress) progress(n, count);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(std::max<std::uint64_t>(count, 1))));
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  export_annotations(records, options.out);
  if (options.plan_only)
    load_dataset(options.out);
  else
    verify_dataset(options.out);

  GenerateSummary s;
  s.documents = count;
  for (std::uint64_t i = 0; i < count; ++i) {
    s.pages += records[i].pages.size();
    s.elements += records[i].elements.size();
    s.forced_breaks += forced[i];
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

}  // namespace docsynth
