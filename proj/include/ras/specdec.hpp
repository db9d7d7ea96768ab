#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ras/errors.hpp"
#include "ras/rans.hpp"

namespace ras::specdec {

enum class AnchorMode { zero, last_value, image };

struct PredictorConfig {
  AnchorMode mode = AnchorMode::zero;
  uint32_t image_width = 0;  // required for AnchorMode::image
  uint32_t delta = 8;

  void validate() const {
    if (mode == AnchorMode::image && image_width == 0)
      fail(Err::bad_config, "image anchor requires a layout width");
  }

  // The window never needs to reach past the alphabet.
  uint32_t effective_delta(uint32_t alphabet) const { return std::min(delta, alphabet); }
};

// Per-decode counters. Two step totals are kept:
//  - total_steps_guided charges one step per CDF probe including the anchor
//    probe and the window gate check;
//  - total_search_steps charges only the probes of the symbol search itself
//    (the anchor-centred refinement on a hit, the full fallback search on a
//    miss). This is the per-symbol search-depth figure the step statistics
//    and step_ratio report; the fixed verification cost is visible in the
//    accounted total and in measured_overhead.
struct SearchStats {
  uint64_t symbols_decoded = 0;
  uint64_t gate_hits = 0;
  uint64_t anchor_exact_hits = 0;
  uint64_t fallbacks = 0;
  uint64_t total_steps_guided = 0;
  uint64_t total_search_steps = 0;
  uint64_t total_steps_baseline = 0;  // filled by a shadow run
  uint64_t steps_on_gate_hits = 0;
  uint32_t delta = 0;

  double avg_steps() const {
    return symbols_decoded ? double(total_steps_guided) / double(symbols_decoded) : 0.0;
  }
  double avg_search_steps() const {
    return symbols_decoded ? double(total_search_steps) / double(symbols_decoded) : 0.0;
  }
  double avg_steps_baseline() const {
    return symbols_decoded ? double(total_steps_baseline) / double(symbols_decoded) : 0.0;
  }
  double gate_hit_rate() const {
    return symbols_decoded ? double(gate_hits) / double(symbols_decoded) : 0.0;
  }
  double anchor_exact_rate() const {
    return symbols_decoded ? double(anchor_exact_hits) / double(symbols_decoded) : 0.0;
  }
  // Average accounted probes beyond log2(2*delta + 1) on gate hits.
  double measured_overhead() const {
    if (gate_hits == 0) return 0.0;
    return double(steps_on_gate_hits) / double(gate_hits) - std::log2(double(2 * delta + 1));
  }

  void merge(const SearchStats& other) {
    symbols_decoded += other.symbols_decoded;
    gate_hits += other.gate_hits;
    anchor_exact_hits += other.anchor_exact_hits;
    fallbacks += other.fallbacks;
    total_steps_guided += other.total_steps_guided;
    total_search_steps += other.total_search_steps;
    total_steps_baseline += other.total_steps_baseline;
    steps_on_gate_hits += other.steps_on_gate_hits;
  }
};

// Context anchor. Image mode reads the raster neighbours of position `index`
// out of the already-decoded prefix; the average rounds down.
inline uint32_t anchor_mu(const std::vector<uint8_t>& decoded, uint64_t index,
                          const PredictorConfig& cfg, uint32_t alphabet) {
  uint32_t mu = 0;
  switch (cfg.mode) {
    case AnchorMode::zero:
      mu = 0;
      break;
    case AnchorMode::last_value:
      mu = index ? decoded[size_t(index - 1)] : 0;
      break;
    case AnchorMode::image: {
      const uint64_t x = index % cfg.image_width;
      const uint64_t y = index / cfg.image_width;
      const bool has_left = x > 0;
      const bool has_up = y > 0;
      if (has_left && has_up) {
        const uint32_t left = decoded[size_t(index - 1)];
        const uint32_t up = decoded[size_t(index - cfg.image_width)];
        mu = (left + up) / 2;
      } else if (has_left) {
        mu = decoded[size_t(index - 1)];
      } else if (has_up) {
        mu = decoded[size_t(index - cfg.image_width)];
      } else {
        mu = 0;
      }
      break;
    }
  }
  return std::min(mu, alphabet - 1);
}

struct Window {
  uint32_t lo = 0;
  uint32_t hi = 0;
};

inline Window window_for(uint32_t mu, uint32_t delta, uint32_t alphabet) {
  return {mu >= delta ? mu - delta : 0, std::min(alphabet - 1, mu + delta)};
}

// Gate check: does the slot fall inside the bracketed CDF span?
inline bool window_gate(uint32_t slot, std::span<const uint32_t> cdf, const Window& w) {
  return cdf[w.lo] <= slot && slot < cdf[w.hi + 1];
}

struct GuidedOutcome {
  uint32_t symbol = 0;
  uint32_t steps = 0;         // accounted: anchor probe + gate + search probes
  uint32_t search_steps = 0;  // search probes only
  bool gate_hit = false;
  bool anchor_exact = false;
};

// Probe order: (1) the anchor symbol itself; (2) the window gate; (3) on a
// gate hit, binary refinement over the half of the window the anchor probe
// pointed at; on a miss, the full baseline search. The returned symbol is
// always the one baseline_search would find.
inline GuidedOutcome guided_search(uint32_t slot, std::span<const uint32_t> cdf, uint32_t mu,
                                   uint32_t delta) {
  const uint32_t count = uint32_t(cdf.size() - 1);
  if (cdf[mu] <= slot && slot < cdf[mu + 1]) return {mu, 1, 1, true, true};

  // slot < cdf[0] is impossible, so a low miss implies mu > 0; a high miss
  // implies mu < count - 1 because slot < cdf[count].
  const bool below = slot < cdf[mu];
  const Window w = window_for(mu, delta, count);
  if (window_gate(slot, cdf, w)) {
    const uint32_t lo = below ? w.lo : mu + 1;
    const uint32_t hi = below ? mu - 1 : w.hi;
    const rans::SearchResult r = rans::bounded_search(slot, cdf, lo, hi);
    return {r.symbol, 2 + r.steps, 1 + r.steps, true, false};
  }
  const rans::SearchResult r = rans::baseline_search(slot, cdf);
  return {r.symbol, 2 + r.steps, r.steps, false, false};
}

// decode_stream search callback: reads the anchor context out of the decoded
// prefix the loop passes in and accumulates stats.
class GuidedSearcher {
 public:
  GuidedSearcher(const PredictorConfig& cfg, uint32_t alphabet, SearchStats& stats)
      : cfg_(cfg), alphabet_(alphabet), stats_(stats) {
    cfg_.validate();
    delta_ = cfg_.effective_delta(alphabet);
    stats_.delta = delta_;
  }

  rans::SearchResult operator()(uint64_t index, uint32_t slot, const probtab::QuantizedModel& m,
                                const std::vector<uint8_t>& decoded) {
    const uint32_t mu = anchor_mu(decoded, index, cfg_, alphabet_);
    const GuidedOutcome g = guided_search(slot, m.cdf, mu, delta_);
    ++stats_.symbols_decoded;
    stats_.total_steps_guided += g.steps;
    stats_.total_search_steps += g.search_steps;
    if (g.gate_hit) {
      ++stats_.gate_hits;
      stats_.steps_on_gate_hits += g.steps;
      if (g.anchor_exact) ++stats_.anchor_exact_hits;
    } else {
      ++stats_.fallbacks;
    }
    return {g.symbol, g.steps};
  }

 private:
  PredictorConfig cfg_;
  uint32_t alphabet_;
  uint32_t delta_;
  SearchStats& stats_;
};

// Baseline callback with a probe counter, for shadow comparisons.
class BaselineSearcher {
 public:
  explicit BaselineSearcher(uint64_t& total_steps) : total_steps_(total_steps) {}

  rans::SearchResult operator()(uint64_t, uint32_t slot, const probtab::QuantizedModel& m,
                                const std::vector<uint8_t>&) {
    const rans::SearchResult r = rans::baseline_search(slot, m.cdf);
    total_steps_ += r.steps;
    return r;
  }

 private:
  uint64_t& total_steps_;
};

}  // namespace ras::specdec
