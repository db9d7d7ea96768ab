#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ras/errors.hpp"
#include "ras/probtab.hpp"
#include "ras/rans.hpp"
#include "ras/specdec.hpp"
#include "ras/wire.hpp"

namespace ras::container {

inline constexpr uint8_t kVersion = 1;
inline constexpr uint32_t kMaxLanes = 64;
inline constexpr uint32_t kMinAlphabet = 2;
inline constexpr uint32_t kMaxAlphabet = 256;

enum class TableMode : uint8_t { embedded_static = 0, external_adaptive = 1 };

// Byte layout, little-endian, all fields normative:
//   magic "RASC" (4) | version (1) | prob_bits (1) | lane_count (1) |
//   table_mode (1) | alphabet_size u16 | symbol_count u64 |
//   [embedded_static only: alphabet_size u16 frequencies, stored as f-1 so
//    f = 2^16 fits] | lane_count u32 payload lengths | payloads in lane order.
struct Header {
  uint8_t version = kVersion;
  int prob_bits = probtab::kDefaultProbBits;
  uint32_t lane_count = 1;
  TableMode table_mode = TableMode::embedded_static;
  uint32_t alphabet = 0;
  uint64_t symbol_count = 0;
  std::vector<uint32_t> payload_len;
  std::optional<probtab::QuantizedModel> table;  // embedded_static only
};

// Round-robin lane assignment: global index i maps to lane i mod k at
// intra-lane position i div k. Bijective by construction.
struct LaneAssignment {
  uint64_t symbol_count = 0;
  uint32_t lane_count = 1;

  uint32_t lane_of(uint64_t i) const { return uint32_t(i % lane_count); }
  uint64_t position_of(uint64_t i) const { return i / lane_count; }
  uint64_t global_of(uint32_t lane, uint64_t position) const {
    return position * lane_count + lane;
  }
  uint64_t lane_size(uint32_t lane) const {
    return symbol_count > lane ? (symbol_count - lane - 1) / lane_count + 1 : 0;
  }
};

inline LaneAssignment schedule_lanes(uint64_t symbol_count, uint32_t lane_count) {
  if (lane_count == 0 || lane_count > kMaxLanes)
    fail(Err::lane_count_out_of_range, "lane_count must be in 1..64");
  return {symbol_count, lane_count};
}

inline void validate_header_fields(const Header& h) {
  if (h.prob_bits < probtab::kMinProbBits || h.prob_bits > probtab::kMaxProbBits)
    fail(Err::bad_config, "prob_bits out of range");
  if (h.lane_count == 0 || h.lane_count > kMaxLanes)
    fail(Err::lane_count_out_of_range, "lane_count must be in 1..64");
  if (h.alphabet < kMinAlphabet || h.alphabet > kMaxAlphabet)
    fail(Err::table_invariant, "alphabet_size must be in 2..256");
}

inline std::vector<uint8_t> write_container(const Header& h,
                                            const std::vector<std::vector<uint8_t>>& payloads) {
  validate_header_fields(h);
  if (payloads.size() != h.lane_count) fail(Err::bad_config, "payload count != lane_count");
  if (h.table_mode == TableMode::embedded_static) {
    if (!h.table) fail(Err::bad_config, "embedded_static container needs a table");
    if (h.table->alphabet() != h.alphabet || h.table->prob_bits != h.prob_bits)
      fail(Err::table_invariant, "embedded table does not match header");
    uint64_t sum = 0;
    for (uint32_t f : h.table->freq) {
      if (f == 0) fail(Err::table_invariant, "zero frequency in embedded table");
      sum += f;
    }
    if (sum != uint64_t(1) << h.prob_bits)
      fail(Err::table_invariant, "embedded table does not sum to 2^prob_bits");
  } else if (h.table) {
    fail(Err::bad_config, "external_adaptive container must not embed a table");
  }

  wire::Writer w;
  w.u8('R');
  w.u8('A');
  w.u8('S');
  w.u8('C');
  w.u8(h.version);
  w.u8(uint8_t(h.prob_bits));
  w.u8(uint8_t(h.lane_count));
  w.u8(uint8_t(h.table_mode));
  w.u16(uint16_t(h.alphabet));
  w.u64(h.symbol_count);
  if (h.table_mode == TableMode::embedded_static) {
    for (uint32_t f : h.table->freq) w.u16(uint16_t(f - 1));
  }
  for (const auto& p : payloads) {
    if (p.size() > UINT32_MAX) fail(Err::bad_config, "lane payload exceeds the 32-bit length field");
    w.u32(uint32_t(p.size()));
  }
  for (const auto& p : payloads) w.bytes(p);
  return w.take();
}

struct Parsed {
  Header header;
  std::vector<std::span<const uint8_t>> payloads;  // views into the input buffer
};

inline Parsed parse_container(std::span<const uint8_t> bytes) {
  wire::Reader r(bytes);
  if (r.u8() != 'R' || r.u8() != 'A' || r.u8() != 'S' || r.u8() != 'C')
    fail(Err::bad_magic, "not a RASC container");
  Parsed out;
  Header& h = out.header;
  h.version = r.u8();
  if (h.version != kVersion) fail(Err::unsupported_version, "unknown container version");
  h.prob_bits = r.u8();
  h.lane_count = r.u8();
  const uint8_t mode = r.u8();
  if (mode > 1) fail(Err::table_invariant, "unknown table mode");
  h.table_mode = TableMode(mode);
  h.alphabet = r.u16();
  h.symbol_count = r.u64();
  validate_header_fields(h);

  if (h.table_mode == TableMode::embedded_static) {
    if (h.alphabet > uint64_t(1) << h.prob_bits)
      fail(Err::infeasible_alphabet, "alphabet larger than 2^prob_bits");
    probtab::QuantizedModel m;
    m.prob_bits = h.prob_bits;
    m.freq.reserve(h.alphabet);
    for (uint32_t i = 0; i < h.alphabet; ++i) m.freq.push_back(uint32_t(r.u16()) + 1);
    m.cdf = probtab::build_cdf(m.freq, h.prob_bits);  // re-verifies the 2^n sum
    h.table = std::move(m);
  }

  h.payload_len.reserve(h.lane_count);
  uint64_t payload_total = 0;
  for (uint32_t i = 0; i < h.lane_count; ++i) {
    h.payload_len.push_back(r.u32());
    payload_total += h.payload_len.back();
  }
  if (r.remaining() != payload_total)
    fail(Err::truncated_stream, "payload bytes do not match header lengths");
  out.payloads.reserve(h.lane_count);
  for (uint32_t i = 0; i < h.lane_count; ++i) out.payloads.push_back(r.bytes(h.payload_len[i]));
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline entry points
// ---------------------------------------------------------------------------

struct EncodeOptions {
  int prob_bits = probtab::kDefaultProbBits;
  uint32_t lane_count = 1;
  TableMode table_mode = TableMode::embedded_static;
};

struct EncodeOutput {
  std::vector<uint8_t> bytes;
  uint64_t payload_bytes = 0;  // lane payloads only, header excluded
  uint64_t header_bytes = 0;
};

inline EncodeOutput encode(std::span<const uint8_t> symbols, const probtab::ModelSource& source,
                           const EncodeOptions& opt) {
  if (source.prob_bits() != opt.prob_bits) fail(Err::bad_config, "model prob_bits mismatch");
  const bool adaptive = opt.table_mode == TableMode::external_adaptive;
  if (adaptive != source.is_adaptive())
    fail(Err::bad_config, "table mode does not match the model source");
  if (adaptive && source.row_count() < symbols.size())
    fail(Err::bad_config, "adaptive table has fewer rows than symbols");

  Header h;
  h.prob_bits = opt.prob_bits;
  h.lane_count = opt.lane_count;
  h.table_mode = opt.table_mode;
  h.alphabet = source.alphabet();
  h.symbol_count = symbols.size();
  schedule_lanes(h.symbol_count, h.lane_count);
  if (!adaptive) h.table = source.model_for(0);

  auto payloads = rans::encode_stream(symbols, h.alphabet, h.prob_bits, h.lane_count,
                                      [&](uint64_t i) -> const probtab::QuantizedModel& {
                                        return source.model_for(i);
                                      });
  EncodeOutput out;
  for (const auto& p : payloads) out.payload_bytes += p.size();
  out.bytes = write_container(h, payloads);
  out.header_bytes = out.bytes.size() - out.payload_bytes;
  return out;
}

struct DecodeOptions {
  bool guided = false;
  bool shadow_baseline = false;
  specdec::PredictorConfig predictor;
};

struct DecodeOutput {
  std::vector<uint8_t> symbols;
  Header header;
  specdec::SearchStats stats;  // guided counters; baseline totals when that path ran
  bool ran_guided = false;
  bool ran_baseline = false;
};

// Checks that close out a lane: every payload byte consumed and the state
// back at its initial value. Catches table/stream mismatches that decode
// "successfully" otherwise.
inline void check_lane_closure(const rans::StreamDecodeResult& r,
                               const std::vector<std::span<const uint8_t>>& payloads) {
  for (size_t i = 0; i < payloads.size(); ++i) {
    if (r.consumed[i] != payloads[i].size())
      fail(Err::corrupt_state, "lane " + std::to_string(i) + " left undecoded bytes");
    if (r.final_state[i] != rans::kLowBound)
      fail(Err::corrupt_state, "lane " + std::to_string(i) + " did not return to the initial state");
  }
}

inline DecodeOutput decode(std::span<const uint8_t> bytes, const DecodeOptions& opt,
                           const probtab::ModelSource* external = nullptr) {
  Parsed parsed = parse_container(bytes);
  const Header& h = parsed.header;

  std::optional<probtab::ModelSource> local;
  const probtab::ModelSource* source = nullptr;
  if (h.table_mode == TableMode::embedded_static) {
    if (external) fail(Err::bad_config, "container carries its own table");
    local = probtab::ModelSource::from_static_model(*h.table);
    source = &*local;
  } else {
    if (!external) fail(Err::bad_config, "external_adaptive container needs a table file");
    if (!external->is_adaptive()) fail(Err::bad_config, "external model source is not adaptive");
    if (external->alphabet() != h.alphabet)
      fail(Err::table_invariant, "external table alphabet does not match container");
    if (external->prob_bits() != h.prob_bits)
      fail(Err::bad_config, "external table prob_bits does not match container");
    if (external->row_count() < h.symbol_count)
      fail(Err::bad_config, "external table has fewer rows than symbols");
    source = external;
  }
  const auto model_at = [&](uint64_t i) -> const probtab::QuantizedModel& {
    return source->model_for(i);
  };

  DecodeOutput out;
  out.ran_baseline = !opt.guided || opt.shadow_baseline;
  out.ran_guided = opt.guided;

  rans::StreamDecodeResult base;
  if (out.ran_baseline) {
    uint64_t steps = 0;
    specdec::BaselineSearcher searcher(steps);
    base = rans::decode_stream(parsed.payloads, h.symbol_count, h.prob_bits, model_at, searcher);
    check_lane_closure(base, parsed.payloads);
    out.stats.total_steps_baseline = steps;
  }

  rans::StreamDecodeResult guided;
  if (out.ran_guided) {
    specdec::GuidedSearcher searcher(opt.predictor, h.alphabet, out.stats);
    guided = rans::decode_stream(parsed.payloads, h.symbol_count, h.prob_bits, model_at, searcher);
    check_lane_closure(guided, parsed.payloads);
  }

  if (out.ran_baseline && out.ran_guided) {
    // Must be impossible: the guided path verifies before advancing.
    if (guided.symbols != base.symbols || guided.consumed != base.consumed)
      throw std::logic_error("guided decode diverged from baseline");
  }

  out.symbols = out.ran_guided ? std::move(guided.symbols) : std::move(base.symbols);
  if (!out.ran_guided) out.stats.symbols_decoded = out.symbols.size();
  out.header = std::move(parsed.header);
  return out;
}

}  // namespace ras::container
