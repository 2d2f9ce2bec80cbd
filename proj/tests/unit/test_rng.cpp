#include <cmath>
#include <vector>

#include "doctest.h"
#include "irrl/rng.hpp"

using irrl::NormalStream;
using irrl::Philox4x32;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) ==
        C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             K{0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             K{0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal stream is addressable and deterministic") {
  NormalStream a(42, 3), b(42, 3);
  std::vector<double> x(5), y(5);
  for (std::uint64_t step : {0ull, 1ull, 123456789ull}) {
    a.fill(step, x);
    b.fill(step, y);
    CHECK(x == y);
    for (std::uint32_t i = 0; i < 5; ++i) CHECK(a.at(step, i) == x[i]);
  }
}

TEST_CASE("normal stream moments") {
  NormalStream s(7, 0);
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  std::vector<double> z(2);
  for (int k = 0; k < n / 2; ++k) {
    s.fill(static_cast<std::uint64_t>(k), z);
    for (double v : z) {
      CHECK(std::isfinite(v));
      m1 += v;
      m2 += v * v;
      m4 += v * v * v * v;
    }
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  CHECK(std::fabs(m1) < 5.0 / std::sqrt(n));
  CHECK(std::fabs(m2 - 1.0) < 0.02);
  CHECK(std::fabs(m4 - 3.0) < 0.1);
}

TEST_CASE("distinct streams and seeds are uncorrelated") {
  NormalStream a(1, 0), b(1, 1), c(2, 0);
  const int n = 100000;
  double ab = 0, ac = 0;
  for (int k = 0; k < n; ++k) {
    const auto step = static_cast<std::uint64_t>(k);
    ab += a.at(step, 0) * b.at(step, 0);
    ac += a.at(step, 0) * c.at(step, 0);
  }
  CHECK(std::fabs(ab / n) < 3.0 / std::sqrt(n) * 1.5);
  CHECK(std::fabs(ac / n) < 3.0 / std::sqrt(n) * 1.5);
}

TEST_CASE("fnv1a32 reference values") {
  const unsigned char empty[1] = {0};
  CHECK(irrl::fnv1a32(std::span<const unsigned char>(empty, 0)) == 2166136261u);
  const unsigned char a[] = {'a'};
  CHECK(irrl::fnv1a32(a) == 0xe40c292cu);
}
