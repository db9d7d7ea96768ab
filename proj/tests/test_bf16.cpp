#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ras/bf16.hpp"

using ras::probtab::Bf16;

TEST_CASE("bf16 conversion golden values") {
  CHECK(Bf16::from_float(1.0f).bits == 0x3F80);
  CHECK(Bf16::from_float(0.5f).bits == 0x3F00);
  // 0.2f is 0x3E4CCCCD; the discarded half 0xCCCD rounds the kept half up.
  CHECK(Bf16::from_float(0.2f).bits == 0x3E4D);
  CHECK(Bf16::from_float(0.0f).bits == 0x0000);
  CHECK(Bf16::from_float(-0.0f).bits == 0x8000);
  CHECK(Bf16::from_bits(0x3F80).to_float() == 1.0f);
  CHECK(Bf16::from_bits(0x3E4D).to_float() == 0.2001953125f);
}

TEST_CASE("bf16 pattern validation") {
  CHECK(Bf16::from_bits(0x0000).valid_probability());
  CHECK(Bf16::from_bits(0x3F80).valid_probability());
  CHECK_FALSE(Bf16::from_bits(0x8000).valid_probability());  // -0
  CHECK_FALSE(Bf16::from_bits(0xBF80).valid_probability());  // -1
  CHECK_FALSE(Bf16::from_bits(0x7F80).valid_probability());  // +inf
  CHECK_FALSE(Bf16::from_bits(0x7FC1).valid_probability());  // NaN
}

TEST_CASE("bf16 exact decomposition") {
  const Bf16 p = Bf16::from_float(0.2f);  // 0x3E4D
  CHECK(p.mantissa_units() == 205);
  CHECK(p.pow2_exponent() == -10);
  CHECK(std::ldexp(double(p.mantissa_units()), p.pow2_exponent()) == double(p.to_float()));
  const Bf16 sub = Bf16::from_bits(0x0001);  // smallest subnormal
  CHECK(sub.mantissa_units() == 1);
  CHECK(sub.pow2_exponent() == -133);
}

TEST_CASE("bf16 round-to-nearest-even matches the candidate oracle") {
  std::mt19937_64 rng(0x5EED5EEDu);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  std::uniform_real_distribution<float> wide(-4.0f, 4.0f);
  for (int i = 0; i < 20000; ++i) {
    float x;
    switch (i % 4) {
      case 0:
        x = unit(rng);
        break;
      case 1:
        x = wide(rng);
        break;
      case 2:  // force an exact tie in the discarded half
        x = std::bit_cast<float>((uint32_t(rng()) & 0x7FFF0000u) | 0x8000u);
        break;
      default:  // tiny, near the subnormal range
        x = std::ldexp(unit(rng), -120);
        break;
    }
    if (!std::isfinite(x)) continue;
    CAPTURE(x);
    CHECK(Bf16::from_float(x).bits == oracles::nearest_bf16(x));
  }
}

TEST_CASE("bf16 result is within one ulp of the input") {
  std::mt19937_64 rng(0xB16B00B5u);
  std::uniform_real_distribution<float> unit(0.0f, 1.5f);
  for (int i = 0; i < 5000; ++i) {
    const float x = unit(rng);
    const Bf16 b = Bf16::from_float(x);
    const uint16_t lo_bits = uint16_t(std::bit_cast<uint32_t>(x) >> 16);
    const float lo = Bf16::from_bits(lo_bits).to_float();
    const float hi = Bf16::from_bits(uint16_t(lo_bits + 1)).to_float();
    const double ulp = double(hi) - double(lo);
    CHECK(std::fabs(double(b.to_float()) - double(x)) <= ulp);
  }
}
