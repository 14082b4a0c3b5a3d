#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace docsynth {

/// Counter-based random stream (Philox4x32-10) keyed on a seed and a
/// hierarchical path such as (document, subnetwork, instance).
///
/// Two streams built from the same (seed, path) produce the same sequence;
/// the key of a child stream is a hash of the parent key and the child
/// index, so the draws of one document never depend on how many other
/// documents were generated before it or on which worker runs it.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed) noexcept;
  RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

  /// Independent stream one level deeper in the path hierarchy.
  RngStream child(std::uint64_t index) const noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform in (0, 1); safe to take the logarithm of.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t draws() const noexcept { return counter_ * 2 - buffered_; }

 private:
  RngStream(std::uint64_t key, int) noexcept : key_(key) {}
  void refill() noexcept;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// Philox4x32 with ten rounds; exposed for the known-answer test.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

}  // namespace docsynth
