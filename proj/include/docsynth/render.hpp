#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "docsynth/layout.hpp"
#include "docsynth/raster.hpp"

namespace docsynth {

/// Per-element ink accounting: pixels changed by the element's operations,
/// and how many of those fall inside the element's box.
struct InkAudit {
  std::vector<long long> total;
  std::vector<long long> inside;
};

/// Draws one chart into `box`, clipped to `clip`. Throws BoxTooSmall when the
/// box is under 32x32 pixels.
void render_chart(Image& image, const ChartPlan& chart, const IntRect& box, const std::vector<Rgb>& palette,
                  Rgb axis_color, const IntRect& clip);

/// Subplots of a figure tiled in a near-square grid inside the frame.
std::vector<IntRect> subplot_grid(const IntRect& frame, std::size_t count);

/// Rasterizes composed pages. One instance per worker: it caches decoded
/// library images and shares the worker's glyph cache.
class Renderer {
 public:
  explicit Renderer(TextEngine& text) : text_(&text) {}

  /// Background first, then every placed operation in order. With `audit`,
  /// also attributes changed pixels to elements.
  std::vector<Image> render(const ComposedDocument& doc, InkAudit* audit = nullptr);

  void draw(Image& image, const DrawOp& op);

 private:
  const Image& library_image(const std::filesystem::path& file);

  TextEngine* text_;
  std::map<std::filesystem::path, Image> images_;
};

}  // namespace docsynth
