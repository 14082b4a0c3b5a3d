#pragma once

// Brute-force references for the layout metrics, shared by the unit and
// acceptance tests. Only the element types come from the library.

#include <algorithm>
#include <vector>

#include "docsynth/layout.hpp"
#include "docsynth/rng.hpp"

namespace layout_oracle {

using namespace docsynth;

inline LayoutElement box(Category c, int x, int y, int w, int h, int page = 0) {
  LayoutElement e;
  e.category = c;
  e.page = page;
  e.box = {x, y, w, h};
  return e;
}

// Pixel-grid oracle: counts, pixel by pixel, how many pairs cover it.
inline double overlap_oracle(const std::vector<LayoutElement>& els, int w, int h) {
  long long pairs = 0;
  long long area = 0;
  for (int page = 0; page < 3; ++page)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        long long k = 0;
        for (const auto& e : els)
          if (e.page == page && e.category != Category::TableCell && e.box.contains_point(x, y)) ++k;
        pairs += k * (k - 1) / 2;
        area += k;
      }
  return area == 0 ? 0.0 : static_cast<double>(pairs) / static_cast<double>(area);
}

// Nearest same-kind guide by sorting every peer's guides and bisecting.
inline double alignment_oracle(const std::vector<LayoutElement>& els, const std::vector<PageInfo>& pages) {
  double sum = 0;
  int n = 0;
  for (std::size_t i = 0; i < els.size(); ++i) {
    if (els[i].category == Category::TableCell) continue;
    std::vector<double> guides[3];
    for (std::size_t j = 0; j < els.size(); ++j) {
      if (j == i || els[j].page != els[i].page || els[j].category == Category::TableCell) continue;
      const auto& b = els[j].box;
      guides[0].push_back(b.x);
      guides[1].push_back(b.x + 0.5 * b.w);
      guides[2].push_back(b.x + b.w);
    }
    if (guides[0].empty()) continue;
    const auto& a = els[i].box;
    const double mine[3] = {static_cast<double>(a.x), a.x + 0.5 * a.w, static_cast<double>(a.x + a.w)};
    double best = 1e300;
    for (int g = 0; g < 3; ++g) {
      auto& v = guides[g];
      std::sort(v.begin(), v.end());
      const auto it = std::lower_bound(v.begin(), v.end(), mine[g]);
      if (it != v.end()) best = std::min(best, *it - mine[g]);
      if (it != v.begin()) best = std::min(best, mine[g] - *(it - 1));
    }
    sum += best / pages[static_cast<std::size_t>(els[i].page)].width;
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

inline std::vector<LayoutElement> random_layout(RngStream& rng, int count, int w, int h) {
  std::vector<LayoutElement> els;
  for (int i = 0; i < count; ++i) {
    const int bw = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(w / 2));
    const int bh = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(h / 2));
    const int x = static_cast<int>(rng() % static_cast<std::uint64_t>(w - bw + 1));
    const int y = static_cast<int>(rng() % static_cast<std::uint64_t>(h - bh + 1));
    auto e = box(static_cast<Category>(1 + rng() % kCategoryCount), x, y, bw, bh, static_cast<int>(rng() % 2));
    e.element_id = i;
    els.push_back(e);
  }
  return els;
}

}  // namespace layout_oracle
