#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ras/bf16.hpp"
#include "ras/errors.hpp"
#include "ras/wire.hpp"

namespace ras::probtab {

inline constexpr int kMinProbBits = 1;
inline constexpr int kMaxProbBits = 16;
inline constexpr int kDefaultProbBits = 12;

inline void check_prob_bits(int n) {
  if (n < kMinProbBits || n > kMaxProbBits) fail(Err::bad_config, "prob_bits must be in 1..16");
}

// One per-context row of calibrated symbol probabilities in storage format.
struct Bf16Table {
  uint32_t context_id = 0;
  std::vector<Bf16> probs;
};

// Fixed-point model: integer frequencies summing to exactly 2^prob_bits and
// their exclusive prefix sums. Immutable once built; shared read-only by
// encoder and decoder lanes.
struct QuantizedModel {
  std::vector<uint32_t> freq;
  std::vector<uint32_t> cdf;  // freq.size() + 1 entries, cdf[0] == 0
  int prob_bits = 0;

  uint32_t alphabet() const { return uint32_t(freq.size()); }
  uint32_t scale() const { return 1u << prob_bits; }
};

// f = max(1, round(p * 2^n)) with round-half-away-from-zero, evaluated in
// exact integer arithmetic on the BF16 decomposition. Values too large for
// 32 bits saturate; mass correction trims them back below 2^n anyway.
inline uint32_t bf16_to_fixed(Bf16 p, int prob_bits) {
  check_prob_bits(prob_bits);
  if (!p.valid_probability()) fail(Err::invalid_probability, "negative, NaN or infinite probability");
  const uint64_t m = p.mantissa_units();
  if (m == 0) return 1;
  const int k = p.pow2_exponent() + prob_bits;
  uint64_t r;
  if (k >= 0) {
    r = k >= 56 ? UINT64_MAX : (m << k);
  } else {
    const int sh = -k;
    r = sh >= 64 ? 0 : ((m + (uint64_t(1) << (sh - 1))) >> sh);
  }
  r = std::max<uint64_t>(r, 1);
  return uint32_t(std::min<uint64_t>(r, UINT32_MAX));
}

// Forces sum(freq) == 2^n while keeping every entry >= 1. The rule is the
// iterative one -- repeatedly increment/decrement the largest entry, ties to
// the lowest index -- computed in closed form so that huge surpluses do not
// need per-unit loops. Equivalence with the step-by-step rule is covered by
// tests.
inline std::vector<uint32_t> mass_correct(std::vector<uint32_t> freq, int prob_bits) {
  check_prob_bits(prob_bits);
  const uint64_t target = uint64_t(1) << prob_bits;
  if (freq.empty()) fail(Err::invalid_frequency, "empty frequency table");
  if (freq.size() > target) fail(Err::infeasible_alphabet, "alphabet larger than 2^prob_bits");
  uint64_t total = 0;
  for (uint32_t f : freq) {
    if (f == 0) fail(Err::invalid_frequency, "zero frequency");
    total += f;
  }

  if (total < target) {
    // All of the deficit lands on the first maximum: once incremented it
    // stays the unique maximum.
    const size_t idx = size_t(std::max_element(freq.begin(), freq.end()) - freq.begin());
    freq[idx] += uint32_t(target - total);
    return freq;
  }
  if (total == target) return freq;

  // Draining the maxima levels the top entries to a cap v, with the first
  // d candidates (index order) finishing one below it.
  // S(v) = sum(min(freq, v)) is nondecreasing; find the smallest v with
  // S(v) >= target.
  const auto capped_sum = [&](uint32_t cap) {
    uint64_t s = 0;
    for (uint32_t f : freq) s += std::min(f, cap);
    return s;
  };
  uint32_t lo = 1, hi = *std::max_element(freq.begin(), freq.end());
  while (lo < hi) {
    const uint32_t mid = lo + (hi - lo) / 2;
    if (capped_sum(mid) >= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const uint32_t level = lo;
  uint64_t extra = capped_sum(level) - target;
  for (auto& f : freq) f = std::min(f, level);
  for (auto& f : freq) {
    if (extra == 0) break;
    if (f == level) {
      --f;
      --extra;
    }
  }
  return freq;
}

inline std::vector<uint32_t> build_cdf(std::span<const uint32_t> freq, int prob_bits) {
  std::vector<uint32_t> cdf(freq.size() + 1, 0);
  uint64_t run = 0;
  for (size_t i = 0; i < freq.size(); ++i) {
    cdf[i] = uint32_t(run);
    run += freq[i];
  }
  cdf[freq.size()] = uint32_t(run);
  if (run != uint64_t(1) << prob_bits) fail(Err::table_invariant, "frequencies do not sum to 2^prob_bits");
  return cdf;
}

// The one-time conversion: BF16 row -> integer frequencies -> mass
// correction -> CDF. Pure; the result is cached and reused by both coder
// directions.
inline QuantizedModel quantize_table(const Bf16Table& table, int prob_bits) {
  check_prob_bits(prob_bits);
  if (table.probs.empty()) fail(Err::invalid_probability, "empty probability table");
  if (table.probs.size() > uint64_t(1) << prob_bits)
    fail(Err::infeasible_alphabet, "alphabet larger than 2^prob_bits");
  bool any_positive = false;
  for (Bf16 p : table.probs) {
    if (!p.valid_probability()) fail(Err::invalid_probability, "invalid table entry");
    any_positive = any_positive || !p.is_zero();
  }
  if (!any_positive) fail(Err::invalid_probability, "all-zero probability table");

  QuantizedModel m;
  m.prob_bits = prob_bits;
  m.freq.reserve(table.probs.size());
  for (Bf16 p : table.probs) m.freq.push_back(bf16_to_fixed(p, prob_bits));
  m.freq = mass_correct(std::move(m.freq), prob_bits);
  m.cdf = build_cdf(m.freq, prob_bits);
  return m;
}

// ---------------------------------------------------------------------------
// BF16 table file ("RASP"): the interchange format for externally supplied
// per-position distributions.
//
//   magic "RASP" | version 0x01 | alphabet u16 | row_count u64 |
//   row_count * alphabet BF16 entries, 2 bytes each, little-endian,
//   row-major. Row k holds the distribution for symbol position k.
// ---------------------------------------------------------------------------

inline constexpr uint8_t kTableFileVersion = 1;

struct Bf16TableFile {
  uint16_t alphabet = 0;
  uint64_t row_count = 0;
  std::vector<Bf16> data;  // row-major

  std::span<const Bf16> row(uint64_t k) const {
    return std::span<const Bf16>(data).subspan(k * alphabet, alphabet);
  }
};

inline std::vector<uint8_t> write_table_file(const Bf16TableFile& t) {
  if (t.data.size() != size_t(t.row_count) * t.alphabet)
    fail(Err::bad_config, "table data does not match row_count * alphabet");
  wire::Writer w;
  w.u8('R');
  w.u8('A');
  w.u8('S');
  w.u8('P');
  w.u8(kTableFileVersion);
  w.u16(t.alphabet);
  w.u64(t.row_count);
  for (Bf16 p : t.data) w.u16(p.bits);
  return w.take();
}

inline Bf16TableFile read_table_file(std::span<const uint8_t> bytes) {
  wire::Reader r(bytes);
  if (r.u8() != 'R' || r.u8() != 'A' || r.u8() != 'S' || r.u8() != 'P')
    fail(Err::bad_magic, "not a BF16 table file");
  if (r.u8() != kTableFileVersion) fail(Err::unsupported_version, "unknown table file version");
  Bf16TableFile t;
  t.alphabet = r.u16();
  t.row_count = r.u64();
  if (t.alphabet == 0) fail(Err::table_invariant, "zero alphabet");
  const uint64_t entries = uint64_t(t.alphabet) * t.row_count;
  if (r.remaining() != entries * 2) fail(Err::truncated_stream, "table payload size mismatch");
  t.data.reserve(size_t(entries));
  for (uint64_t i = 0; i < entries; ++i) t.data.push_back(Bf16::from_bits(r.u16()));
  for (uint64_t k = 0; k < t.row_count; ++k) {
    bool any_positive = false;
    for (Bf16 p : t.row(k)) {
      if (!p.valid_probability()) fail(Err::invalid_probability, "invalid table entry in row " + std::to_string(k));
      any_positive = any_positive || !p.is_zero();
    }
    if (!any_positive) fail(Err::invalid_probability, "all-zero row " + std::to_string(k));
  }
  return t;
}

// Caches the fixed-point conversion of either one shared row or one row per
// symbol position.
class ModelSource {
 public:
  static ModelSource from_static(const Bf16Table& table, int prob_bits) {
    ModelSource s;
    s.adaptive_ = false;
    s.models_.push_back(quantize_table(table, prob_bits));
    return s;
  }

  static ModelSource from_static_model(QuantizedModel model) {
    ModelSource s;
    s.adaptive_ = false;
    s.models_.push_back(std::move(model));
    return s;
  }

  static ModelSource from_rows(const Bf16TableFile& file, int prob_bits) {
    ModelSource s;
    s.adaptive_ = true;
    s.models_.reserve(size_t(file.row_count));
    for (uint64_t k = 0; k < file.row_count; ++k) {
      Bf16Table row;
      row.context_id = uint32_t(k);
      row.probs.assign(file.row(k).begin(), file.row(k).end());
      s.models_.push_back(quantize_table(row, prob_bits));
    }
    if (s.models_.empty()) fail(Err::empty_input, "table file has no rows");
    return s;
  }

  const QuantizedModel& model_for(uint64_t position) const {
    return adaptive_ ? models_.at(size_t(position)) : models_.front();
  }

  bool is_adaptive() const { return adaptive_; }
  uint64_t row_count() const { return models_.size(); }
  uint32_t alphabet() const { return models_.front().alphabet(); }
  int prob_bits() const { return models_.front().prob_bits; }

 private:
  std::vector<QuantizedModel> models_;
  bool adaptive_ = false;
};

}  // namespace ras::probtab
