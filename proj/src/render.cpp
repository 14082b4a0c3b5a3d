#include "docsynth/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "docsynth/error.hpp"
#include "docsynth/image_io.hpp"

namespace docsynth {

namespace {

int round_px(double v) { return static_cast<int>(std::floor(v + 0.5)); }

Rgb palette_color(const std::vector<Rgb>& palette, std::size_t i) {
  return palette.empty() ? kBlack : palette[i % palette.size()];
}

}  // namespace

std::vector<IntRect> subplot_grid(const IntRect& frame, std::size_t count) {
  std::vector<IntRect> out;
  if (count == 0) return out;
  const int gc = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int gr = static_cast<int>((count + gc - 1) / gc);
  const int gap = count > 1 ? std::max(2, frame.w / 40) : 0;
  const int cw = (frame.w - gap * (gc - 1)) / gc;
  const int ch = (frame.h - gap * (gr - 1)) / gr;
  for (std::size_t i = 0; i < count; ++i) {
    const int r = static_cast<int>(i) / gc;
    const int c = static_cast<int>(i) % gc;
    out.push_back({frame.x + c * (cw + gap), frame.y + r * (ch + gap), cw, ch});
  }
  return out;
}

void render_chart(Image& image, const ChartPlan& chart, const IntRect& box, const std::vector<Rgb>& palette,
                  Rgb axis_color, const IntRect& clip) {
  if (box.w < 32 || box.h < 32)
    throw Error(ErrorCode::BoxTooSmall,
                "chart box " + std::to_string(box.w) + "x" + std::to_string(box.h) + " is under 32x32");
  const IntRect area = intersect(box, clip);
  const Rgb main = palette_color(palette, chart.color_offset);
  const int n = chart.cols;

  if (chart.type == ChartType::Pie) {
    double sum = 0.0;
    for (const double v : chart.values) sum += std::max(0.0, v);
    const PointF c{box.x + box.w / 2.0, box.y + box.h / 2.0};
    const double r = 0.45 * std::min(box.w, box.h);
    double a = -std::numbers::pi / 2;
    for (std::size_t i = 0; i < chart.values.size(); ++i) {
      if (sum <= 0.0) break;
      const double sweep = 2.0 * std::numbers::pi * std::max(0.0, chart.values[i]) / sum;
      if (sweep <= 0.0) continue;
      fill_path(image, Path::wedge(c, r, a, a + sweep), palette_color(palette, chart.color_offset + i), area);
      a += sweep;
    }
    return;
  }

  if (chart.type == ChartType::Heatmap) {
    const int rows = std::max(1, chart.rows);
    const int cols = std::max(1, n);
    const Rgb light = mix(main, kWhite, 0.9);
    const auto xs = [&](int i) { return box.x + static_cast<int>(static_cast<long long>(box.w) * i / cols); };
    const auto ys = [&](int i) { return box.y + static_cast<int>(static_cast<long long>(box.h) * i / rows); };
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const double v = std::clamp(chart.values.at(static_cast<std::size_t>(r * cols + c)), 0.0, 1.0);
        const IntRect cell{xs(c), ys(r), xs(c + 1) - xs(c), ys(r + 1) - ys(r)};
        fill_rect(image, intersect(cell, area), mix(light, main, v));
      }
    return;
  }

  // Axes along the left and bottom edges; the plot sits inside them.
  const int ax = std::max(4, box.w / 12);
  const int ay = std::max(4, box.h / 12);
  const IntRect plot{box.x + ax, box.y + ay / 2, box.w - ax - ax / 2, box.h - ay - ay / 2};
  fill_rect(image, intersect(IntRect{plot.x - 1, plot.y, 1, plot.h + 1}, area), axis_color);
  fill_rect(image, intersect(IntRect{plot.x - 1, plot.bottom(), plot.w + 1, 1}, area), axis_color);

  double vmax = 0.0;
  for (const double v : chart.values) vmax = std::max(vmax, v);
  if (vmax <= 0.0) vmax = 1.0;

  switch (chart.type) {
    case ChartType::Bar: {
      const double slot = static_cast<double>(plot.w) / std::max(1, n);
      for (int i = 0; i < n; ++i) {
        const double v = std::max(0.0, chart.values.at(static_cast<std::size_t>(i)));
        const int h = round_px(v / vmax * plot.h);
        const int x0 = plot.x + round_px(slot * (i + 0.15));
        const int x1 = plot.x + round_px(slot * (i + 0.85));
        fill_rect(image, intersect(IntRect{x0, plot.bottom() - h, std::max(1, x1 - x0), h}, area), main);
      }
      break;
    }
    case ChartType::Line: {
      std::vector<PointF> pts;
      for (int i = 0; i < n; ++i) {
        const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.5;
        const double v = std::max(0.0, chart.values.at(static_cast<std::size_t>(i)));
        pts.push_back({plot.x + t * plot.w, plot.bottom() - v / vmax * plot.h});
      }
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) fill_path(image, Path::thick_line(pts[i], pts[i + 1], 1.5), main, area);
      for (const auto& p : pts) fill_path(image, Path::ellipse(p, 2.0, 2.0), main, area);
      break;
    }
    case ChartType::Scatter: {
      // x coordinates in the first row, y in the second.
      for (int i = 0; i < n && chart.rows == 2; ++i) {
        const double x = std::clamp(chart.values.at(static_cast<std::size_t>(i)), 0.0, 1.0);
        const double y = std::clamp(chart.values.at(static_cast<std::size_t>(n + i)), 0.0, 1.0);
        fill_path(image, Path::ellipse({plot.x + x * plot.w, plot.bottom() - y * plot.h}, 2.0, 2.0), main, area);
      }
      break;
    }
    default: break;
  }
}

const Image& Renderer::library_image(const std::filesystem::path& file) {
  auto it = images_.find(file);
  if (it != images_.end()) return it->second;
  return images_.emplace(file, read_image(file)).first->second;
}

void Renderer::draw(Image& image, const DrawOp& op) {
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, TextOp>) {
          text_->draw(image, *o.font, o.size_px, o.text, o.x, o.baseline, o.color, o.clip);
        } else if constexpr (std::is_same_v<T, RectOp>) {
          fill_rect(image, o.rect, o.color);
        } else if constexpr (std::is_same_v<T, ShapeOp>) {
          fill_path(image, o.path, o.color, o.clip);
        } else if constexpr (std::is_same_v<T, ImageOp>) {
          const Image& src = library_image(o.file);
          if (src.width <= 0 || src.height <= 0) return;
          // Letterbox: the largest aspect-preserving fit, centred.
          const double s = std::min(static_cast<double>(o.frame.w) / src.width,
                                    static_cast<double>(o.frame.h) / src.height);
          const int w = std::clamp(round_px(src.width * s), 1, o.frame.w);
          const int h = std::clamp(round_px(src.height * s), 1, o.frame.h);
          const IntRect dst{o.frame.x + (o.frame.w - w) / 2, o.frame.y + (o.frame.h - h) / 2, w, h};
          draw_image_scaled(image, src, dst, o.frame);
        } else {
          const auto boxes = subplot_grid(o.frame, o.charts.size());
          for (std::size_t i = 0; i < o.charts.size(); ++i)
            render_chart(image, o.charts[i], boxes[i], o.palette, o.axis_color, o.frame);
        }
      },
      op);
}

std::vector<Image> Renderer::render(const ComposedDocument& doc, InkAudit* audit) {
  std::vector<Image> pages;
  pages.reserve(doc.pages.size());
  for (const auto& p : doc.pages) pages.emplace_back(p.width, p.height, p.background);
  if (audit) {
    audit->total.assign(doc.elements.size(), 0);
    audit->inside.assign(doc.elements.size(), 0);
  }
  std::vector<std::uint8_t> before;
  for (const auto& placed : doc.placed) {
    Image& img = pages.at(static_cast<std::size_t>(placed.page));
    if (!audit || placed.owner < 0) {
      draw(img, placed.op);
      continue;
    }
    // Compare a neighbourhood of the op's declared ink, wide enough to catch
    // ink that strays outside it.
    int pad = 4;
    if (const auto* t = std::get_if<TextOp>(&placed.op)) pad = static_cast<int>(std::ceil(t->size_px));
    const IntRect region = intersect(
        IntRect{placed.ink.x - pad, placed.ink.y - pad, placed.ink.w + 2 * pad, placed.ink.h + 2 * pad},
        img.bounds());
    before.resize(static_cast<std::size_t>(std::max(0, region.w)) * std::max(0, region.h) * 3);
    for (int y = 0; y < region.h; ++y)
      std::copy_n(img.row(region.y + y) + 3 * region.x, 3 * region.w, before.data() + 3 * static_cast<std::size_t>(y) * region.w);
    draw(img, placed.op);
    const IntRect box = doc.elements.at(static_cast<std::size_t>(placed.owner)).box;
    for (int y = 0; y < region.h; ++y) {
      const std::uint8_t* now = img.row(region.y + y) + 3 * region.x;
      const std::uint8_t* was = before.data() + 3 * static_cast<std::size_t>(y) * region.w;
      for (int x = 0; x < region.w; ++x) {
        if (now[3 * x] == was[3 * x] && now[3 * x + 1] == was[3 * x + 1] && now[3 * x + 2] == was[3 * x + 2]) continue;
        ++audit->total[static_cast<std::size_t>(placed.owner)];
        if (box.contains_point(region.x + x, region.y + y)) ++audit->inside[static_cast<std::size_t>(placed.owner)];
      }
    }
  }
  return pages;
}

}  // namespace docsynth
