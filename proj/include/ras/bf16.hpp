#pragma once

#include <bit>
#include <cstdint>

namespace ras::probtab {

// Brain floating point: 1 sign, 8 exponent, 7 mantissa bits -- the top half
// of an IEEE-754 binary32 pattern.
struct Bf16 {
  uint16_t bits = 0;

  static constexpr Bf16 from_bits(uint16_t b) { return Bf16{b}; }

  // Round-to-nearest-even on the discarded low half. Inf/NaN patterns pass
  // through unchanged; table validation rejects them later.
  static Bf16 from_float(float v) {
    const uint32_t u = std::bit_cast<uint32_t>(v);
    if ((u & 0x7F800000u) == 0x7F800000u) return Bf16{uint16_t(u >> 16)};
    const uint32_t round_lsb = (u >> 16) & 1u;
    return Bf16{uint16_t((u + 0x7FFFu + round_lsb) >> 16)};
  }

  constexpr float to_float() const { return std::bit_cast<float>(uint32_t(bits) << 16); }

  constexpr bool sign() const { return (bits & 0x8000u) != 0; }
  constexpr bool is_finite() const { return (bits & 0x7F80u) != 0x7F80u; }
  constexpr bool is_zero() const { return (bits & 0x7FFFu) == 0; }

  // A probability entry must decode to a finite non-negative real; negative
  // patterns (including -0) are rejected outright.
  constexpr bool valid_probability() const { return is_finite() && !sign(); }

  // Exact decomposition value == mantissa_units() * 2^pow2_exponent().
  constexpr uint32_t mantissa_units() const {
    const uint32_t exp = (bits >> 7) & 0xFFu;
    const uint32_t man = bits & 0x7Fu;
    return exp == 0 ? man : (man | 0x80u);
  }

  constexpr int pow2_exponent() const {
    const int exp = (bits >> 7) & 0xFF;
    return (exp == 0 ? 1 - 127 : exp - 127) - 7;
  }

  friend constexpr bool operator==(Bf16 a, Bf16 b) { return a.bits == b.bits; }
};

}  // namespace ras::probtab
