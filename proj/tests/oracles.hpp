#pragma once

// Independent reference implementations the unit and acceptance suites check
// the library against. Everything here is deliberately naive and kept apart
// from the code paths under test.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ras/bf16.hpp"
#include "ras/probtab.hpp"

namespace oracles {

// Nearest BF16 by explicit candidate comparison: the truncated pattern and
// its successor bracket the value; pick the closer one, ties to the even
// mantissa. Works in double precision, entirely apart from the carry trick.
// Assumes finite input.
inline uint16_t nearest_bf16(float x) {
  const uint32_t u = std::bit_cast<uint32_t>(x);
  const uint32_t mag = u & 0x7FFFFFFFu;
  if ((mag & 0xFFFFu) == 0) return uint16_t(u >> 16);  // exactly representable
  const uint16_t sign = uint16_t((u >> 31) << 15);
  const uint16_t lo = uint16_t(mag >> 16);  // largest bf16 magnitude <= |x|
  const uint16_t hi = uint16_t(lo + 1);     // may be the inf pattern
  const double vx = double(std::bit_cast<float>(mag));
  const double vlo = double(std::bit_cast<float>(uint32_t(lo) << 16));
  // If hi overflows into the inf pattern, compare against the value the
  // pattern continues to (2^128); that reproduces the IEEE overflow rule.
  const double vhi = hi == 0x7F80 ? 0x1.0p128 : double(std::bit_cast<float>(uint32_t(hi) << 16));
  const double dlo = vx - vlo;
  const double dhi = vhi - vx;
  uint16_t pick;
  if (dlo < dhi) {
    pick = lo;
  } else if (dhi < dlo) {
    pick = hi;
  } else {
    pick = (lo & 1u) == 0 ? lo : hi;
  }
  return uint16_t(sign | pick);
}

// round(p * 2^n) with half away from zero, in long double (64-bit mantissa on
// x86: exact for any BF16 value scaled by 2^n within the uint32 range).
inline uint64_t fixed_from_bf16(ras::probtab::Bf16 p, int n) {
  const long double v = (long double)(p.to_float()) * std::exp2((long double)n);
  long double r = std::floor(v + 0.5L);
  if (r < 1.0L) r = 1.0L;
  if (r > (long double)UINT64_MAX) r = (long double)UINT64_MAX;
  return (uint64_t)r;
}

// The mass-correction rule, executed literally one unit at a time.
inline std::vector<uint32_t> naive_mass_correct(std::vector<uint32_t> freq, int n) {
  const uint64_t target = uint64_t(1) << n;
  uint64_t total = 0;
  for (uint32_t f : freq) total += f;
  while (total > target) {
    size_t best = 0;
    for (size_t i = 1; i < freq.size(); ++i)
      if (freq[i] > freq[best]) best = i;
    if (freq[best] > 1) {
      --freq[best];
      --total;
    } else {
      break;  // all ones; infeasible unless already at target
    }
  }
  while (total < target) {
    size_t best = 0;
    for (size_t i = 1; i < freq.size(); ++i)
      if (freq[i] > freq[best]) best = i;
    ++freq[best];
    ++total;
  }
  return freq;
}

// Symbol lookup by linear scan.
inline uint32_t linear_scan_symbol(uint32_t slot, std::span<const uint32_t> cdf) {
  for (uint32_t x = 0; x + 1 < cdf.size(); ++x)
    if (cdf[x] <= slot && slot < cdf[x + 1]) return x;
  return uint32_t(cdf.size());  // not found; callers treat as failure
}

// ---------------------------------------------------------------------------
// Deterministic random inputs for property tests
// ---------------------------------------------------------------------------

// Random BF16 probability rows covering the awkward shapes: roughly uniform,
// spiky, all-near-zero, and unnormalized rows.
inline ras::probtab::Bf16Table random_table(std::mt19937_64& rng, uint32_t alphabet) {
  using ras::probtab::Bf16;
  ras::probtab::Bf16Table t;
  t.probs.reserve(alphabet);
  std::uniform_int_distribution<int> shape_pick(0, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int shape = shape_pick(rng);
  std::vector<double> w(alphabet, 0.0);
  switch (shape) {
    case 0:  // flat-ish
      for (auto& v : w) v = 0.5 + unit(rng);
      break;
    case 1: {  // spike
      const uint32_t star = uint32_t(rng() % alphabet);
      for (uint32_t i = 0; i < alphabet; ++i) w[i] = (i == star) ? 1000.0 : unit(rng) * 0.01;
      break;
    }
    case 2:  // all near zero (unnormalized on purpose)
      for (auto& v : w) v = unit(rng) * 1e-6;
      break;
    case 3: {  // geometric decay
      double p = 1.0;
      for (auto& v : w) {
        v = p * (0.5 + unit(rng));
        p *= 0.8;
      }
      break;
    }
    default:  // unnormalized, sums to ~2
      for (auto& v : w) v = 2.0 * unit(rng);
      break;
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  const bool normalize = shape != 2 && shape != 4;
  bool any = false;
  for (double v : w) {
    const float p = float(normalize && sum > 0 ? v / sum : v);
    Bf16 b = Bf16::from_float(p);
    any = any || !b.is_zero();
    t.probs.push_back(b);
  }
  if (!any) t.probs[rng() % alphabet] = Bf16::from_float(0.5f);
  return t;
}

// Symbols drawn from a quantized model's own distribution.
inline std::vector<uint8_t> sample_symbols(std::mt19937_64& rng,
                                           const ras::probtab::QuantizedModel& m, size_t count) {
  std::vector<uint8_t> out;
  out.reserve(count);
  const uint32_t mask = m.scale() - 1;
  for (size_t i = 0; i < count; ++i) {
    const uint32_t slot = uint32_t(rng()) & mask;
    out.push_back(uint8_t(linear_scan_symbol(slot, m.cdf)));
  }
  return out;
}

}  // namespace oracles
