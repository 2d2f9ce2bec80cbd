#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace irrl {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// Stateless: the output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Standard normal draws addressed by (seed, stream, step, coordinate).
///
/// One Philox block yields two 53-bit uniforms, turned into two normals by
/// Box-Muller; coordinates 2j and 2j+1 of a step share block j.
class NormalStream {
 public:
  static constexpr std::string_view algorithm_id = "philox4x32-10/box-muller/v1";

  NormalStream(std::uint64_t seed, std::uint32_t stream_id) noexcept;

  /// Fill `out` with the normals of the given step (out[i] is coordinate i).
  void fill(std::uint64_t step, std::span<double> out) const noexcept;

  double at(std::uint64_t step, std::uint32_t coordinate) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t stream_id() const noexcept { return stream_; }

 private:
  std::array<double, 2> block(std::uint64_t step, std::uint32_t block) const noexcept;

  std::uint64_t seed_;
  std::uint32_t stream_;
};

/// Uniform in [0,1) with 53 random bits.
inline double uniform53(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// 32-bit FNV-1a over raw bytes; used to derive stream ids from cell coordinates.
std::uint32_t fnv1a32(std::span<const unsigned char> bytes,
                      std::uint32_t basis = 2166136261u) noexcept;

}  // namespace irrl
