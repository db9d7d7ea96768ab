#pragma once

// Deterministic recipes behind the committed golden fixtures. The builder is
// used once by ras_make_fixtures to produce the files and again by the tests
// to know the expected decoded symbols; the committed bytes themselves are
// the format reference.

#include <cstdint>
#include <string>
#include <vector>

#include "ras/container.hpp"
#include "ras/corpus.hpp"
#include "ras/probtab.hpp"

namespace fixtures {

struct Recipe {
  std::string container_name;
  std::string table_name;  // adaptive fixtures only
  int prob_bits = 12;
  uint32_t lane_count = 1;
  uint32_t alphabet = 256;
  bool adaptive = false;
  uint64_t symbol_count = 0;
};

inline std::vector<Recipe> all() {
  return {
      {"fixture_static_l2.rasc", "", 12, 2, 256, false, 64},
      {"fixture_static_l1.rasc", "", 4, 1, 7, false, 10},
      {"fixture_adaptive_l4.rasc", "fixture_table.rasp", 12, 4, 32, true, 96},
  };
}

inline std::vector<uint8_t> recipe_symbols(const Recipe& r) {
  if (r.container_name == "fixture_static_l2.rasc")
    return ras::corpus::gen_gradient_image(8, 8, 4, 7).pixels;
  if (r.container_name == "fixture_static_l1.rasc")
    return {0, 1, 2, 3, 4, 5, 6, 0, 1, 2};
  // adaptive: a seeded walk through the 32-symbol alphabet
  std::vector<uint8_t> symbols(size_t(r.symbol_count));
  ras::corpus::Lcg rng(0xF1C5);
  for (auto& s : symbols) s = uint8_t(rng.next() % r.alphabet);
  return symbols;
}

inline ras::probtab::Bf16TableFile recipe_table_file(const Recipe& r) {
  using ras::probtab::Bf16;
  ras::probtab::Bf16TableFile file;
  file.alphabet = uint16_t(r.alphabet);
  file.row_count = r.symbol_count;
  ras::corpus::Lcg rng(0x7AB1E5);
  for (uint64_t k = 0; k < file.row_count; ++k)
    for (uint32_t x = 0; x < r.alphabet; ++x) {
      // bumpy but strictly positive rows
      const uint32_t weight = 1 + rng.next() % 64;
      file.data.push_back(Bf16::from_float(float(weight) / 2048.0f));
    }
  return file;
}

struct Built {
  std::vector<uint8_t> container;
  std::vector<uint8_t> table_file;
  std::vector<uint8_t> symbols;
};

inline Built build(const Recipe& r) {
  using namespace ras;
  Built out;
  out.symbols = recipe_symbols(r);

  container::EncodeOptions opt;
  opt.prob_bits = r.prob_bits;
  opt.lane_count = r.lane_count;

  if (r.adaptive) {
    opt.table_mode = container::TableMode::external_adaptive;
    const auto table = recipe_table_file(r);
    out.table_file = probtab::write_table_file(table);
    const auto source = probtab::ModelSource::from_rows(table, r.prob_bits);
    out.container = container::encode(out.symbols, source, opt).bytes;
    return out;
  }

  probtab::ModelSource source = [&] {
    if (r.container_name == "fixture_static_l1.rasc") {
      probtab::Bf16Table t;
      for (float p : {0.3f, 0.2f, 0.15f, 0.1f, 0.1f, 0.1f, 0.05f})
        t.probs.push_back(probtab::Bf16::from_float(p));
      return probtab::ModelSource::from_static(t, r.prob_bits);
    }
    return probtab::ModelSource::from_static(corpus::histogram_model(out.symbols, r.alphabet),
                                             r.prob_bits);
  }();
  out.container = container::encode(out.symbols, source, opt).bytes;
  return out;
}

inline uint64_t fnv64(std::span<const uint8_t> bytes) {
  uint64_t h = 1469598103934665603ull;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace fixtures
