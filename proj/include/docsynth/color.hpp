#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace docsynth {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};

/// Parses "#RRGGBB". Returns nullopt for anything else.
std::optional<Rgb> parse_hex_color(std::string_view text) noexcept;
std::string to_hex(Rgb color);

/// Linear interpolation per channel with round-half-up; t in [0, 1].
Rgb mix(Rgb from, Rgb to, double t) noexcept;

}  // namespace docsynth
