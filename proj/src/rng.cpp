#include "irrl/rng.hpp"

#include <cmath>
#include <numbers>

namespace irrl {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint32_t stream_id) noexcept
    : seed_(seed), stream_(stream_id) {}

std::array<double, 2> NormalStream::block(std::uint64_t step,
                                          std::uint32_t blk) const noexcept {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(step),
                                   static_cast<std::uint32_t>(step >> 32), stream_, blk};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_),
                               static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = Philox4x32::generate(ctr, key);
  const std::uint64_t b0 = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  const std::uint64_t b1 = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  // u1 in (0,1] keeps the logarithm finite.
  const double u1 = (static_cast<double>(b0 >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform53(b1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

void NormalStream::fill(std::uint64_t step, std::span<double> out) const noexcept {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; i += 2) {
    const auto z = block(step, static_cast<std::uint32_t>(i / 2));
    out[i] = z[0];
    if (i + 1 < n) out[i + 1] = z[1];
  }
}

double NormalStream::at(std::uint64_t step, std::uint32_t coordinate) const noexcept {
  return block(step, coordinate / 2)[coordinate % 2];
}

std::uint32_t fnv1a32(std::span<const unsigned char> bytes, std::uint32_t basis) noexcept {
  std::uint32_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

}  // namespace irrl
