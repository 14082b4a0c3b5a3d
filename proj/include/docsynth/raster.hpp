#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "docsynth/color.hpp"

namespace docsynth {

/// Integer pixel rectangle, top-left origin, half-open extents.
struct IntRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const noexcept { return x + w; }
  int bottom() const noexcept { return y + h; }
  bool empty() const noexcept { return w <= 0 || h <= 0; }
  long long area() const noexcept { return empty() ? 0 : static_cast<long long>(w) * h; }
  bool contains(const IntRect& o) const noexcept {
    return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
  }
  bool contains_point(int px, int py) const noexcept { return px >= x && py >= y && px < right() && py < bottom(); }
  bool operator==(const IntRect&) const = default;
};

IntRect intersect(const IntRect& a, const IntRect& b) noexcept;
/// Smallest rectangle containing both; an empty operand is ignored.
IntRect unite(const IntRect& a, const IntRect& b) noexcept;
IntRect translate(const IntRect& r, int dx, int dy) noexcept;

/// 8-bit RGB raster, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, Rgb fill = kWhite);

  std::uint8_t* row(int y) noexcept { return pixels.data() + static_cast<std::size_t>(y) * width * 3; }
  const std::uint8_t* row(int y) const noexcept { return pixels.data() + static_cast<std::size_t>(y) * width * 3; }
  Rgb at(int x, int y) const noexcept {
    const auto* p = row(y) + 3 * x;
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) noexcept {
    auto* p = row(y) + 3 * x;
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
  IntRect bounds() const noexcept { return {0, 0, width, height}; }
  bool operator==(const Image&) const = default;
};

struct PointF {
  double x = 0.0;
  double y = 0.0;
};

/// Vector path of lines and quadratic curves. Every contour is implicitly
/// closed when rasterized.
class Path {
 public:
  enum class Verb : std::uint8_t { Move, Line, Quad };

  void move_to(PointF p);
  void line_to(PointF p);
  void quad_to(PointF control, PointF end);

  /// Applies x' = a*x + b*y + c, y' = d*x + e*y + f.
  void transform(const std::array<double, 6>& m);
  void append(const Path& other);

  bool empty() const noexcept { return verbs_.empty(); }
  const std::vector<Verb>& verbs() const noexcept { return verbs_; }
  const std::vector<PointF>& points() const noexcept { return points_; }
  /// Bounds of all points (control points included).
  void bounds(double& x0, double& y0, double& x1, double& y1) const;

  static Path rect(double x, double y, double w, double h);
  static Path polygon(const std::vector<PointF>& pts);
  /// Circle or pie wedge approximated by a polygon; angles in radians,
  /// clockwise on screen from the positive x axis.
  static Path wedge(PointF center, double radius, double start, double end);
  static Path ellipse(PointF center, double rx, double ry);
  /// Quadrilateral around the segment, `width` pixels thick.
  static Path thick_line(PointF a, PointF b, double width);

 private:
  std::vector<Verb> verbs_;
  std::vector<PointF> points_;
};

/// Signed-area coverage rasterizer: accumulates the area contribution of
/// every edge and integrates along rows, giving exact anti-aliased coverage
/// under the nonzero rule for non-self-overlapping contours. Coordinates are
/// pixels with y down.
class CoverageRasterizer {
 public:
  CoverageRasterizer(int width, int height);
  void add_path(const Path& path);
  /// Coverage in [0, 255], row-major width x height.
  std::vector<std::uint8_t> coverage() const;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

 private:
  void line(PointF p0, PointF p1);
  void quad(PointF p0, PointF p1, PointF p2);

  int width_;
  int height_;
  int stride_;
  std::vector<float> acc_;
};

/// Blends `color` through an alpha mask placed with its top-left at (x, y),
/// limited to `clip`. `opacity` scales the mask.
void blend_mask(Image& image, const std::uint8_t* alpha, int mask_w, int mask_h, int x, int y, Rgb color,
                const IntRect& clip, double opacity = 1.0);

void fill_rect(Image& image, const IntRect& rect, Rgb color);
/// Rectangle outline `thickness` pixels wide, drawn inside `rect`.
void stroke_rect(Image& image, const IntRect& rect, int thickness, Rgb color);
/// Anti-aliased fill of a path, limited to `clip`.
void fill_path(Image& image, const Path& path, Rgb color, const IntRect& clip, double opacity = 1.0);

/// Bilinear resampling of `src` into `dst_rect`, limited to `clip`.
void draw_image_scaled(Image& image, const Image& src, const IntRect& dst_rect, const IntRect& clip);

}  // namespace docsynth
