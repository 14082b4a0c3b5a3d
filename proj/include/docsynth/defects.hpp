#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "docsynth/font.hpp"
#include "docsynth/probnet.hpp"
#include "docsynth/raster.hpp"
#include "docsynth/templates.hpp"

namespace docsynth {

enum class DefectKind { BleedThrough, Shadow, DarkCorner, Watermark, Occlusion, Blur };
enum class Side { Left, Right, Top, Bottom };
enum class Corner { TopLeft, TopRight, BottomLeft, BottomRight };

std::string_view defect_name(DefectKind kind) noexcept;

/// Mirrored verso content composited with this peak opacity.
struct BleedThrough {
  double opacity = 0.0;
  bool operator==(const BleedThrough&) const = default;
};

/// Darkening gradient along one page edge; `width` is a fraction of the page
/// dimension across that edge.
struct Shadow {
  Side side = Side::Left;
  double width = 0.0;
  double darkness = 0.0;
  bool operator==(const Shadow&) const = default;
};

/// Radial darkening from a corner; `radius` is a fraction of the shorter page
/// side.
struct DarkCorner {
  Corner corner = Corner::TopLeft;
  double radius = 0.0;
  double darkness = 0.0;
  bool operator==(const DarkCorner&) const = default;
};

/// Rotated text centred at (x, y) (page fractions), `size` the em height as a
/// fraction of the page width, `angle` in degrees counter-clockwise.
struct Watermark {
  std::string text;
  double angle = 0.0;
  double x = 0.5;
  double y = 0.5;
  double opacity = 0.0;
  double size = 0.1;
  Rgb color;
  bool operator==(const Watermark&) const = default;
};

/// Opaque flat rectangle in page fractions, at most a tenth of the page.
struct Occlusion {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
  Rgb color;
  bool operator==(const Occlusion&) const = default;
};

/// Gaussian blur with standard deviation `radius` pixels.
struct Blur {
  double radius = 0.0;
  bool operator==(const Blur&) const = default;
};

using DefectOp = std::variant<BleedThrough, Shadow, DarkCorner, Watermark, Occlusion, Blur>;

inline DefectKind kind_of(const DefectOp& op) noexcept { return static_cast<DefectKind>(op.index()); }

struct DefectPlan {
  /// Applied in list order, which sampling keeps in DefectKind order.
  std::vector<DefectOp> ops;
  bool operator==(const DefectPlan&) const = default;
};

inline constexpr double kMaxOcclusionArea = 0.1;

/// Draws every defect's presence and parameters from the document's realized
/// defect nodes. `realized` must hold every "defects.*" node of the template.
DefectPlan sample_defect_plan(const TemplateSpec& spec, const std::map<std::string, Realized>& realized,
                              RngStream rng);

/// Applies the plan to every page in place. Pixels only: geometry and so the
/// annotations are untouched. Watermark text uses the first family of
/// `fonts` that covers it (bold face preferred); uncovered code points are
/// skipped.
void apply_defects(std::vector<Image>& pages, const DefectPlan& plan, const FontSet& fonts);

/// Separable Gaussian blur, kernel truncated at 3 sigma. Radius 0 is a no-op.
void gaussian_blur(Image& image, double sigma);

}  // namespace docsynth
