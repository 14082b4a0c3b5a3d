#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "docsynth/templates.hpp"

namespace docsynth {

/// Text and image resources of one template, loaded once and shared
/// read-only by every worker.
struct TemplateResources {
  std::vector<std::string> vocabulary;
  std::vector<std::string> sentences;
  std::vector<std::pair<std::string, std::string>> qa_pairs;
  /// Library images relative to the library root, sorted; discovery is
  /// recursive and keeps .png/.jpg/.jpeg files.
  std::vector<std::string> images;
  std::filesystem::path image_root;
};

TemplateResources load_resources(const TemplateSpec& spec);
std::vector<TemplateResources> load_resources(const TemplateMixture& mixture);

/// Non-empty lines of a UTF-8 text file, without trailing CR.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace docsynth
