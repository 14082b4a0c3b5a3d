#include "docsynth/raster.hpp"

#include <cmath>
#include <numbers>

namespace docsynth {

IntRect intersect(const IntRect& a, const IntRect& b) noexcept {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right());
  const int y1 = std::min(a.bottom(), b.bottom());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

IntRect unite(const IntRect& a, const IntRect& b) noexcept {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  return {x0, y0, std::max(a.right(), b.right()) - x0, std::max(a.bottom(), b.bottom()) - y0};
}

IntRect translate(const IntRect& r, int dx, int dy) noexcept { return {r.x + dx, r.y + dy, r.w, r.h}; }

Image::Image(int w, int h, Rgb fill) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

// --- Path ---------------------------------------------------------------------

void Path::move_to(PointF p) {
  verbs_.push_back(Verb::Move);
  points_.push_back(p);
}

void Path::line_to(PointF p) {
  verbs_.push_back(Verb::Line);
  points_.push_back(p);
}

void Path::quad_to(PointF control, PointF end) {
  verbs_.push_back(Verb::Quad);
  points_.push_back(control);
  points_.push_back(end);
}

void Path::transform(const std::array<double, 6>& m) {
  for (auto& p : points_) p = {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
}

void Path::append(const Path& other) {
  verbs_.insert(verbs_.end(), other.verbs_.begin(), other.verbs_.end());
  points_.insert(points_.end(), other.points_.begin(), other.points_.end());
}

void Path::bounds(double& x0, double& y0, double& x1, double& y1) const {
  x0 = y0 = HUGE_VAL;
  x1 = y1 = -HUGE_VAL;
  for (const auto& p : points_) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
}

Path Path::rect(double x, double y, double w, double h) {
  return polygon({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}});
}

Path Path::polygon(const std::vector<PointF>& pts) {
  Path p;
  if (pts.empty()) return p;
  p.move_to(pts[0]);
  for (std::size_t i = 1; i < pts.size(); ++i) p.line_to(pts[i]);
  return p;
}

Path Path::wedge(PointF center, double radius, double start, double end) {
  const double sweep = end - start;
  const int steps = std::max(2, static_cast<int>(std::ceil(std::abs(sweep) * radius / 3.0)));
  std::vector<PointF> pts;
  const bool full = std::abs(sweep) >= 2.0 * std::numbers::pi - 1e-12;
  if (!full) pts.push_back(center);
  for (int i = 0; i <= steps; ++i) {
    const double a = start + sweep * i / steps;
    pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return polygon(pts);
}

Path Path::ellipse(PointF center, double rx, double ry) {
  const int steps = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * std::max(rx, ry) / 3.0)));
  std::vector<PointF> pts;
  for (int i = 0; i < steps; ++i) {
    const double a = 2.0 * std::numbers::pi * i / steps;
    pts.push_back({center.x + rx * std::cos(a), center.y + ry * std::sin(a)});
  }
  return polygon(pts);
}

Path Path::thick_line(PointF a, PointF b, double width) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return rect(a.x - width / 2, a.y - width / 2, width, width);
  const double nx = -dy / len * width / 2;
  const double ny = dx / len * width / 2;
  return polygon({{a.x + nx, a.y + ny}, {b.x + nx, b.y + ny}, {b.x - nx, b.y - ny}, {a.x - nx, a.y - ny}});
}

// --- CoverageRasterizer ---------------------------------------------------------

CoverageRasterizer::CoverageRasterizer(int width, int height)
    : width_(std::max(0, width)), height_(std::max(0, height)), stride_(width_ + 2),
      acc_(static_cast<std::size_t>(stride_) * height_ + 2, 0.0f) {}

void CoverageRasterizer::add_path(const Path& path) {
  const auto& verbs = path.verbs();
  const auto& pts = path.points();
  std::size_t pi = 0;
  PointF start{};
  PointF cur{};
  bool open = false;
  for (const auto verb : verbs) {
    switch (verb) {
      case Path::Verb::Move:
        if (open) line(cur, start);
        start = cur = pts[pi++];
        open = true;
        break;
      case Path::Verb::Line:
        line(cur, pts[pi]);
        cur = pts[pi++];
        break;
      case Path::Verb::Quad:
        quad(cur, pts[pi], pts[pi + 1]);
        cur = pts[pi + 1];
        pi += 2;
        break;
    }
  }
  if (open) line(cur, start);
}

void CoverageRasterizer::quad(PointF p0, PointF p1, PointF p2) {
  const double ddx = p0.x - 2 * p1.x + p2.x;
  const double ddy = p0.y - 2 * p1.y + p2.y;
  const double dd = std::hypot(ddx, ddy);
  // A chord over a parameter step of 1/n deviates from the curve by
  // dd / (4 n^2); keep that below 0.02 px.
  if (dd < 0.08) {
    line(p0, p2);
    return;
  }
  const int n = static_cast<int>(std::ceil(std::sqrt(dd / 0.08)));
  PointF prev = p0;
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double mt = 1.0 - t;
    const PointF p{mt * mt * p0.x + 2 * mt * t * p1.x + t * t * p2.x, mt * mt * p0.y + 2 * mt * t * p1.y + t * t * p2.y};
    line(prev, p);
    prev = p;
  }
}

void CoverageRasterizer::line(PointF a, PointF b) {
  if (a.y == b.y) return;
  double dir = 1.0;
  if (a.y > b.y) {
    std::swap(a, b);
    dir = -1.0;
  }
  // Ink left of the raster still contributes to rows; ink right of it does
  // not. Clamping x keeps both properties.
  const double w = width_;
  const double dxdy = (b.x - a.x) / (b.y - a.y);
  double x = a.x;
  const int y_begin = std::max(0, static_cast<int>(std::floor(a.y)));
  const int y_end = std::min(height_, static_cast<int>(std::ceil(b.y)));
  if (a.y < y_begin) x += (y_begin - a.y) * dxdy;
  for (int y = y_begin; y < y_end; ++y) {
    const double dy = std::min<double>(y + 1, b.y) - std::max<double>(y, a.y);
    const double xnext = x + dxdy * dy;
    const double d = dy * dir;
    double x0 = std::clamp(std::min(x, xnext), 0.0, w);
    double x1 = std::clamp(std::max(x, xnext), 0.0, w);
    float* row = acc_.data() + static_cast<std::size_t>(y) * stride_;
    const double x0floor = std::floor(x0);
    const int x0i = static_cast<int>(x0floor);
    const double x1ceil = std::ceil(x1);
    const int x1i = static_cast<int>(x1ceil);
    if (x1i <= x0i + 1) {
      const double xmf = 0.5 * (x0 + x1) - x0floor;
      row[x0i] += static_cast<float>(d - d * xmf);
      row[x0i + 1] += static_cast<float>(d * xmf);
    } else {
      const double s = 1.0 / (x1 - x0);
      const double x0f = x0 - x0floor;
      const double a0 = 0.5 * s * (1.0 - x0f) * (1.0 - x0f);
      const double x1f = x1 - x1ceil + 1.0;
      const double am = 0.5 * s * x1f * x1f;
      row[x0i] += static_cast<float>(d * a0);
      if (x1i == x0i + 2) {
        row[x0i + 1] += static_cast<float>(d * (1.0 - a0 - am));
      } else {
        const double a1 = s * (1.5 - x0f);
        row[x0i + 1] += static_cast<float>(d * (a1 - a0));
        for (int xi = x0i + 2; xi < x1i - 1; ++xi) row[xi] += static_cast<float>(d * s);
        const double a2 = a1 + (x1i - x0i - 3) * s;
        row[x1i - 1] += static_cast<float>(d * (1.0 - a2 - am));
      }
      row[x1i] += static_cast<float>(d * am);
    }
    x = xnext;
  }
}

std::vector<std::uint8_t> CoverageRasterizer::coverage() const {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width_) * height_);
  for (int y = 0; y < height_; ++y) {
    const float* row = acc_.data() + static_cast<std::size_t>(y) * stride_;
    std::uint8_t* dst = out.data() + static_cast<std::size_t>(y) * width_;
    float acc = 0.0f;
    for (int x = 0; x < width_; ++x) {
      acc += row[x];
      const float c = std::min(1.0f, std::abs(acc));
      dst[x] = static_cast<std::uint8_t>(c * 255.0f + 0.5f);
    }
  }
  return out;
}

// --- compositing ------------------------------------------------------------------

namespace {

inline std::uint8_t lerp8(std::uint8_t dst, std::uint8_t src, int a) {
  // a in [0, 255]; exact rounding of dst + (src - dst) * a / 255.
  const int v = dst * 255 + (src - dst) * a;
  return static_cast<std::uint8_t>((v + 127) / 255);
}

}  // namespace

void blend_mask(Image& image, const std::uint8_t* alpha, int mask_w, int mask_h, int x, int y, Rgb color,
                const IntRect& clip, double opacity) {
  const IntRect area = intersect(intersect({x, y, mask_w, mask_h}, clip), image.bounds());
  if (area.empty()) return;
  const int scale = static_cast<int>(std::lround(std::clamp(opacity, 0.0, 1.0) * 256.0));
  for (int py = area.y; py < area.bottom(); ++py) {
    const std::uint8_t* m = alpha + static_cast<std::size_t>(py - y) * mask_w + (area.x - x);
    std::uint8_t* p = image.row(py) + 3 * area.x;
    for (int px = area.x; px < area.right(); ++px, ++m, p += 3) {
      const int a = (*m * scale) >> 8;
      if (a == 0) continue;
      p[0] = lerp8(p[0], color.r, a);
      p[1] = lerp8(p[1], color.g, a);
      p[2] = lerp8(p[2], color.b, a);
    }
  }
}

void fill_rect(Image& image, const IntRect& rect, Rgb color) {
  const IntRect area = intersect(rect, image.bounds());
  for (int y = area.y; y < area.bottom(); ++y) {
    std::uint8_t* p = image.row(y) + 3 * area.x;
    for (int x = 0; x < area.w; ++x, p += 3) {
      p[0] = color.r;
      p[1] = color.g;
      p[2] = color.b;
    }
  }
}

void stroke_rect(Image& image, const IntRect& rect, int thickness, Rgb color) {
  if (rect.empty() || thickness <= 0) return;
  const int t = std::min({thickness, rect.w, rect.h});
  fill_rect(image, {rect.x, rect.y, rect.w, t}, color);
  fill_rect(image, {rect.x, rect.bottom() - t, rect.w, t}, color);
  fill_rect(image, {rect.x, rect.y, t, rect.h}, color);
  fill_rect(image, {rect.right() - t, rect.y, t, rect.h}, color);
}

void fill_path(Image& image, const Path& path, Rgb color, const IntRect& clip, double opacity) {
  const IntRect area = intersect(clip, image.bounds());
  if (area.empty() || path.empty()) return;
  double x0, y0, x1, y1;
  path.bounds(x0, y0, x1, y1);
  const IntRect box = intersect(area, {static_cast<int>(std::floor(x0)), static_cast<int>(std::floor(y0)),
                                       static_cast<int>(std::ceil(x1)) - static_cast<int>(std::floor(x0)) + 1,
                                       static_cast<int>(std::ceil(y1)) - static_cast<int>(std::floor(y0)) + 1});
  if (box.empty()) return;
  Path local = path;
  local.transform({1, 0, -static_cast<double>(box.x), 0, 1, -static_cast<double>(box.y)});
  CoverageRasterizer r(box.w, box.h);
  r.add_path(local);
  const auto cov = r.coverage();
  blend_mask(image, cov.data(), box.w, box.h, box.x, box.y, color, area, opacity);
}

void draw_image_scaled(Image& image, const Image& src, const IntRect& dst_rect, const IntRect& clip) {
  const IntRect area = intersect(intersect(dst_rect, clip), image.bounds());
  if (area.empty() || src.width == 0 || src.height == 0) return;
  const double sx = static_cast<double>(src.width) / dst_rect.w;
  const double sy = static_cast<double>(src.height) / dst_rect.h;
  for (int y = area.y; y < area.bottom(); ++y) {
    const double fy = std::clamp((y - dst_rect.y + 0.5) * sy - 0.5, 0.0, src.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double ty = fy - y0;
    std::uint8_t* p = image.row(y) + 3 * area.x;
    for (int x = area.x; x < area.right(); ++x, p += 3) {
      const double fx = std::clamp((x - dst_rect.x + 0.5) * sx - 0.5, 0.0, src.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double tx = fx - x0;
      const std::uint8_t* a = src.row(y0) + 3 * x0;
      const std::uint8_t* b = src.row(y0) + 3 * x1;
      const std::uint8_t* c = src.row(y1) + 3 * x0;
      const std::uint8_t* d = src.row(y1) + 3 * x1;
      for (int ch = 0; ch < 3; ++ch) {
        const double top = a[ch] + (b[ch] - a[ch]) * tx;
        const double bottom = c[ch] + (d[ch] - c[ch]) * tx;
        p[ch] = static_cast<std::uint8_t>(std::lround(top + (bottom - top) * ty));
      }
    }
  }
}

}  // namespace docsynth
