#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "ras/errors.hpp"
#include "ras/probtab.hpp"

namespace ras::rans {

// The coder state is a 32-bit unsigned integer kept in [kLowBound, 256 *
// kLowBound) between steps; renormalization moves one byte at a time, so the
// interval ratio matches the byte radix. With kLowBound = 2^23 the state
// never exceeds 2^31.
inline constexpr uint32_t kLowBound = 1u << 23;

class Encoder {
 public:
  // Renormalize-then-update. Emits renorm bytes in execution order (the
  // caller reverses the finished lane buffer once).
  //
  //   s' = floor(s / f) * 2^n + (s mod f) + c
  //
  // The quotient and remainder paths are independent; summing them last
  // keeps the split arithmetically invisible.
  void put(uint32_t freq, uint32_t cum, int prob_bits, std::vector<uint8_t>& out) {
    const uint32_t scale = 1u << prob_bits;
    if (freq == 0 || freq > scale || cum > scale - freq)
      fail(Err::invalid_frequency, "frequency/cdf outside 2^prob_bits");
    const uint32_t limit = ((kLowBound >> prob_bits) << 8) * freq;
    while (state_ >= limit) {
      out.push_back(uint8_t(state_));
      state_ >>= 8;
    }
    const uint32_t quotient_path = (state_ / freq) << prob_bits;
    const uint32_t remainder_path = (state_ % freq) + cum;
    state_ = quotient_path + remainder_path;
  }

  // Four state bytes, least significant first; after the lane reversal the
  // decoder reads them most significant first, ahead of any renorm bytes.
  void flush_to(std::vector<uint8_t>& out) const {
    out.push_back(uint8_t(state_));
    out.push_back(uint8_t(state_ >> 8));
    out.push_back(uint8_t(state_ >> 16));
    out.push_back(uint8_t(state_ >> 24));
  }

  uint32_t state() const { return state_; }
  void set_state(uint32_t s) { state_ = s; }

 private:
  uint32_t state_ = kLowBound;
};

class Decoder {
 public:
  explicit Decoder(std::span<const uint8_t> payload) : payload_(payload) {
    if (payload_.size() < 4) fail(Err::truncated_stream, "lane payload shorter than coder state");
    state_ = (uint32_t(payload_[0]) << 24) | (uint32_t(payload_[1]) << 16) |
             (uint32_t(payload_[2]) << 8) | uint32_t(payload_[3]);
    pos_ = 4;
  }

  uint32_t slot(int prob_bits) const { return state_ & ((1u << prob_bits) - 1); }

  // Update-then-renormalize, the mirror of Encoder::put.
  void advance(uint32_t freq, uint32_t cum, uint32_t slot_value, int prob_bits) {
    state_ = freq * (state_ >> prob_bits) + slot_value - cum;
    while (state_ < kLowBound) {
      if (pos_ == payload_.size()) fail(Err::truncated_stream, "renormalization ran past end of lane");
      state_ = (state_ << 8) | payload_[pos_++];
    }
  }

  uint32_t state() const { return state_; }
  size_t consumed() const { return pos_; }
  bool exhausted() const { return pos_ == payload_.size(); }

 private:
  std::span<const uint8_t> payload_;
  size_t pos_ = 0;
  uint32_t state_ = 0;
};

struct SearchResult {
  uint32_t symbol = 0;
  uint32_t steps = 0;
};

// Bracketing binary search restricted to symbols [lo, hi], assuming slot is
// already known to lie inside that span of the CDF. One step is one probe: a
// test of slot against a single symbol's [cdf[x], cdf[x+1]) interval. A probe
// either resolves the symbol or eliminates it together with one side, so a
// range narrowed to a single candidate resolves without another probe.
inline SearchResult bounded_search(uint32_t slot, std::span<const uint32_t> cdf, uint32_t lo,
                                   uint32_t hi) {
  uint32_t steps = 0;
  while (lo < hi) {
    const uint32_t mid = (lo + hi) >> 1;
    ++steps;
    if (slot < cdf[mid]) {
      hi = mid - 1;
    } else if (slot >= cdf[mid + 1]) {
      lo = mid + 1;
    } else {
      return {mid, steps};
    }
  }
  return {lo, steps};
}

// Full-alphabet search. The one-symbol alphabet still pays its confirming
// probe; inner ranges resolve by elimination.
inline SearchResult baseline_search(uint32_t slot, std::span<const uint32_t> cdf) {
  const uint32_t count = uint32_t(cdf.size() - 1);
  if (count == 1) return {0, 1};
  return bounded_search(slot, cdf, 0, count - 1);
}

// Per-lane encoding. Lane l owns global positions l, l+k, l+2k, ...; they
// are encoded in reverse and the buffer is reversed once so the decoder
// reads the flushed state first, then renorm bytes in consumption order.
// model_at(i) supplies the (cached) fixed-point model for global position i.
template <class ModelAt>
std::vector<std::vector<uint8_t>> encode_stream(std::span<const uint8_t> symbols, uint32_t alphabet,
                                                int prob_bits, uint32_t lane_count, ModelAt&& model_at) {
  probtab::check_prob_bits(prob_bits);
  if (lane_count == 0) fail(Err::lane_count_out_of_range, "lane_count must be >= 1");
  std::vector<std::vector<uint8_t>> lanes(lane_count);
  const uint64_t n = symbols.size();
  for (uint32_t lane = 0; lane < lane_count; ++lane) {
    Encoder enc;
    auto& buf = lanes[lane];
    if (n > lane) {
      uint64_t i = lane + ((n - 1 - lane) / lane_count) * lane_count;
      while (true) {
        const uint8_t sym = symbols[size_t(i)];
        if (sym >= alphabet) fail(Err::symbol_out_of_range, "symbol " + std::to_string(sym));
        const probtab::QuantizedModel& m = model_at(i);
        enc.put(m.freq[sym], m.cdf[sym], prob_bits, buf);
        if (i == lane) break;
        i -= lane_count;
      }
    }
    enc.flush_to(buf);
    std::reverse(buf.begin(), buf.end());
  }
  return lanes;
}

struct StreamDecodeResult {
  std::vector<uint8_t> symbols;
  std::vector<size_t> consumed;       // per lane, including the 4 state bytes
  std::vector<uint32_t> final_state;  // kLowBound on every lane for a well-formed stream
};

// Forward decoding loop shared by the baseline and the guided paths; lanes
// interleave round-robin so the global order is reconstructed exactly.
// search(i, slot, model, decoded_prefix) locates the symbol for global
// position i; the prefix holds the i symbols decoded so far (anchor context).
template <class ModelAt, class SearchFn>
StreamDecodeResult decode_stream(const std::vector<std::span<const uint8_t>>& lane_payloads,
                                 uint64_t symbol_count, int prob_bits, ModelAt&& model_at,
                                 SearchFn&& search) {
  probtab::check_prob_bits(prob_bits);
  if (lane_payloads.empty()) fail(Err::lane_count_out_of_range, "no lanes");
  std::vector<Decoder> lanes;
  lanes.reserve(lane_payloads.size());
  for (auto payload : lane_payloads) lanes.emplace_back(payload);

  StreamDecodeResult out;
  out.symbols.reserve(size_t(std::min<uint64_t>(symbol_count, uint64_t(4) << 20)));
  const uint64_t lane_count = lane_payloads.size();
  for (uint64_t i = 0; i < symbol_count; ++i) {
    Decoder& dec = lanes[size_t(i % lane_count)];
    const probtab::QuantizedModel& m = model_at(i);
    const uint32_t slot = dec.slot(prob_bits);
    const SearchResult r = search(i, slot, m, out.symbols);
    dec.advance(m.freq[r.symbol], m.cdf[r.symbol], slot, prob_bits);
    out.symbols.push_back(uint8_t(r.symbol));
  }
  out.consumed.reserve(lanes.size());
  out.final_state.reserve(lanes.size());
  for (const Decoder& d : lanes) {
    out.consumed.push_back(d.consumed());
    out.final_state.push_back(d.state());
  }
  return out;
}

}  // namespace ras::rans
