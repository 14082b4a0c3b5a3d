#include "docsynth/color.hpp"

#include <cmath>
#include <cstdio>

namespace docsynth {
namespace {

int hex_digit(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::optional<Rgb> parse_hex_color(std::string_view text) noexcept {
  if (text.size() != 7 || text[0] != '#') return std::nullopt;
  std::uint8_t channels[3];
  for (int i = 0; i < 3; ++i) {
    const int hi = hex_digit(text[1 + 2 * i]);
    const int lo = hex_digit(text[2 + 2 * i]);
    if (hi < 0 || lo < 0) return std::nullopt;
    channels[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Rgb{channels[0], channels[1], channels[2]};
}

std::string to_hex(Rgb color) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", color.r, color.g, color.b);
  return buf;
}

Rgb mix(Rgb from, Rgb to, double t) noexcept {
  auto channel = [t](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::floor(a + (static_cast<double>(b) - a) * t + 0.5));
  };
  return {channel(from.r, to.r), channel(from.g, to.g), channel(from.b, to.b)};
}

}  // namespace docsynth
