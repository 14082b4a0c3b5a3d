#include "docsynth/rng.hpp"

namespace docsynth {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(parent ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed) noexcept : key_(splitmix64(seed)) {}

RngStream::RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept
    : key_(splitmix64(seed)) {
  for (std::uint64_t index : path) key_ = derive(key_, index);
}

RngStream RngStream::child(std::uint64_t index) const noexcept {
  return RngStream(derive(key_, index), 0);
}

void RngStream::refill() noexcept {
  const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(counter_),
                                            static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key_),
                                            static_cast<std::uint32_t>(key_ >> 32)};
  const auto out = philox4x32_10(ctr, key);
  ++counter_;
  // Consumed from the back, so buffer_[1] is returned first.
  buffer_[1] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[0] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
}

RngStream::result_type RngStream::operator()() noexcept {
  if (buffered_ == 0) refill();
  return buffer_[--buffered_];
}

}  // namespace docsynth
