#include "docsynth/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "docsynth/error.hpp"

namespace docsynth {

namespace fs = std::filesystem;

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnresolvedResource, "cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

TemplateResources load_resources(const TemplateSpec& spec) {
  TemplateResources out;
  out.vocabulary = read_lines(spec.corpus.vocabulary);
  out.sentences = read_lines(spec.corpus.sentences);
  if (out.sentences.empty())
    throw Error(ErrorCode::UnresolvedResource, "sentence corpus is empty: " + spec.corpus.sentences.string());
  if (spec.table_content == TableContent::QaPairs) {
    for (const auto& line : read_lines(spec.qa_corpus)) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw Error(ErrorCode::ParseError, spec.qa_corpus.string() + ": expected 'question<TAB>answer' lines");
      out.qa_pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    if (out.qa_pairs.empty())
      throw Error(ErrorCode::UnresolvedResource, "question/answer corpus is empty: " + spec.qa_corpus.string());
  }

  out.image_root = spec.image_library;
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(spec.image_library, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    std::string ext = it->path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
      out.images.push_back(fs::relative(it->path(), spec.image_library).generic_string());
  }
  std::sort(out.images.begin(), out.images.end());
  return out;
}

std::vector<TemplateResources> load_resources(const TemplateMixture& mixture) {
  std::vector<TemplateResources> out;
  out.reserve(mixture.templates.size());
  for (const auto& t : mixture.templates) out.push_back(load_resources(t));
  return out;
}

}  // namespace docsynth
