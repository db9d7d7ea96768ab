#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ras/errors.hpp"
#include "ras/probtab.hpp"
#include "ras/wire.hpp"

namespace ras::corpus {

struct ImageBuffer {
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<uint8_t> pixels;  // row-major
};

// Seeded 64-bit LCG (Knuth MMIX constants), upper 31 bits used. Pure integer
// arithmetic so generated corpora are byte-identical across platforms; the
// exact recurrence is documented in the README.
class Lcg {
 public:
  explicit Lcg(uint64_t seed) : state_(seed) {}

  uint32_t next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return uint32_t(state_ >> 33);
  }

 private:
  uint64_t state_;
};

// Diagonal gradient in [0, 255) plus per-pixel uniform noise in
// [-noise_amplitude, +noise_amplitude]. Dividing by width+height keeps the
// step between raster neighbours at most ceil(255/(width+height)).
inline ImageBuffer gen_gradient_image(uint32_t width, uint32_t height, uint32_t noise_amplitude,
                                      uint64_t seed) {
  if (width == 0 || height == 0) fail(Err::bad_dimensions, "image dimensions must be positive");
  if (noise_amplitude > 64) fail(Err::bad_config, "noise amplitude above 64");
  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.pixels.resize(size_t(width) * height);
  Lcg rng(seed);
  const uint64_t denom = uint64_t(width) + height;
  const uint32_t noise_values = 2 * noise_amplitude + 1;
  for (uint32_t y = 0; y < height; ++y) {
    for (uint32_t x = 0; x < width; ++x) {
      int v = int((uint64_t(x) + y) * 255 / denom);
      if (noise_amplitude > 0) v += int(rng.next() % noise_values) - int(noise_amplitude);
      img.pixels[size_t(y) * width + x] = uint8_t(std::clamp(v, 0, 255));
    }
  }
  return img;
}

// Empirical distribution rounded into the BF16 storage format. Symbols that
// never occur get probability zero; quantization later floors them at one
// count, so every byte stays decodable.
inline probtab::Bf16Table histogram_model(std::span<const uint8_t> symbols, uint32_t alphabet) {
  if (symbols.empty()) fail(Err::empty_input, "cannot build a histogram of nothing");
  if (alphabet == 0) fail(Err::bad_config, "alphabet must be positive");
  std::vector<uint64_t> counts(alphabet, 0);
  for (uint8_t s : symbols) {
    if (s >= alphabet) fail(Err::symbol_out_of_range, "symbol " + std::to_string(s));
    ++counts[s];
  }
  probtab::Bf16Table t;
  t.probs.reserve(alphabet);
  const double n = double(symbols.size());
  for (uint64_t c : counts) t.probs.push_back(probtab::Bf16::from_float(float(double(c) / n)));
  return t;
}

// Empirical entropy, bits per symbol.
inline double compute_entropy(std::span<const uint8_t> symbols) {
  if (symbols.empty()) fail(Err::empty_input, "entropy of an empty stream");
  std::vector<uint64_t> counts(256, 0);
  for (uint8_t s : symbols) ++counts[s];
  const double n = double(symbols.size());
  double h = 0.0;
  for (uint64_t c : counts) {
    if (c == 0) continue;
    const double p = double(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

// Cross-entropy against the quantized model: sum of p_hat(x) * log2(2^n /
// f(x)), the achievable bits-per-symbol floor for the coder.
inline double compute_cross_entropy(std::span<const uint8_t> symbols,
                                    const probtab::QuantizedModel& m) {
  if (symbols.empty()) fail(Err::empty_input, "cross-entropy of an empty stream");
  std::vector<uint64_t> counts(m.alphabet(), 0);
  for (uint8_t s : symbols) {
    if (s >= m.alphabet()) fail(Err::symbol_out_of_range, "symbol " + std::to_string(s));
    ++counts[s];
  }
  const double n = double(symbols.size());
  double h = 0.0;
  for (uint32_t x = 0; x < m.alphabet(); ++x) {
    if (counts[x] == 0) continue;
    h += (double(counts[x]) / n) * (double(m.prob_bits) - std::log2(double(m.freq[x])));
  }
  return h;
}

// Per-position cross-entropy for adaptive sources.
inline double compute_cross_entropy_adaptive(std::span<const uint8_t> symbols,
                                             const probtab::ModelSource& source) {
  if (symbols.empty()) fail(Err::empty_input, "cross-entropy of an empty stream");
  double bits = 0.0;
  for (size_t i = 0; i < symbols.size(); ++i) {
    const probtab::QuantizedModel& m = source.model_for(i);
    if (symbols[i] >= m.alphabet()) fail(Err::symbol_out_of_range, "symbol " + std::to_string(symbols[i]));
    bits += double(m.prob_bits) - std::log2(double(m.freq[symbols[i]]));
  }
  return bits / double(symbols.size());
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

struct Layout {
  enum class Kind { raw, pgm, image } kind = Kind::raw;
  uint32_t width = 0;  // image layout only

  static Layout raw() { return {Kind::raw, 0}; }
  static Layout pgm() { return {Kind::pgm, 0}; }
  static Layout image(uint32_t width) { return {Kind::image, width}; }
};

struct Ingested {
  std::vector<uint8_t> symbols;
  std::optional<ImageBuffer> image;
};

// Binary 8-bit PGM (P5) only.
inline ImageBuffer parse_pgm(std::span<const uint8_t> bytes) {
  size_t pos = 0;
  const auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      const char c = char(bytes[pos]);
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#')
      tok.push_back(char(bytes[pos++]));
    if (tok.empty()) fail(Err::truncated_stream, "unexpected end of PGM header");
    return tok;
  };
  const auto next_uint = [&](const char* what) -> uint64_t {
    const std::string tok = next_token();
    uint64_t v = 0;
    for (char c : tok) {
      if (c < '0' || c > '9') fail(Err::unsupported_format, std::string("bad PGM ") + what);
      v = v * 10 + uint64_t(c - '0');
    }
    return v;
  };

  if (next_token() != "P5") fail(Err::unsupported_format, "only binary PGM (P5) is supported");
  const uint64_t width = next_uint("width");
  const uint64_t height = next_uint("height");
  const uint64_t maxval = next_uint("maxval");
  if (width == 0 || height == 0) fail(Err::bad_dimensions, "zero PGM dimension");
  if (maxval == 0 || maxval > 255) fail(Err::unsupported_format, "only 8-bit PGM is supported");
  if (pos >= bytes.size()) fail(Err::truncated_stream, "missing PGM pixel data");
  ++pos;  // single whitespace byte after maxval
  const uint64_t count = width * height;
  if (bytes.size() - pos != count) fail(Err::truncated_stream, "PGM pixel data size mismatch");
  ImageBuffer img;
  img.width = uint32_t(width);
  img.height = uint32_t(height);
  img.pixels.assign(bytes.begin() + std::ptrdiff_t(pos), bytes.end());
  return img;
}

inline std::vector<uint8_t> write_pgm(const ImageBuffer& img) {
  std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

inline Ingested ingest_bytes(std::vector<uint8_t> bytes, const Layout& layout) {
  Ingested out;
  switch (layout.kind) {
    case Layout::Kind::raw:
      out.symbols = std::move(bytes);
      break;
    case Layout::Kind::pgm: {
      ImageBuffer img = parse_pgm(bytes);
      out.symbols = img.pixels;
      out.image = std::move(img);
      break;
    }
    case Layout::Kind::image: {
      if (layout.width == 0) fail(Err::bad_dimensions, "image layout needs a positive width");
      if (bytes.size() % layout.width != 0)
        fail(Err::bad_dimensions, "file size is not a multiple of the image width");
      if (!bytes.empty()) {
        ImageBuffer img;
        img.width = layout.width;
        img.height = uint32_t(bytes.size() / layout.width);
        img.pixels = bytes;
        out.image = std::move(img);
      }
      out.symbols = std::move(bytes);
      break;
    }
  }
  return out;
}

inline Ingested ingest(const std::string& path, const Layout& layout) {
  return ingest_bytes(wire::read_file(path), layout);
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

// Modeled cycle counts mirror the two-stage pipeline: encode needs the fill
// (2 cycles) plus one cycle per symbol; decode needs one cycle per symbol
// plus one per search step. These are reporting models, not measurements.
inline constexpr uint64_t kPipelineFillCycles = 2;

inline uint64_t modeled_encode_cycles(uint64_t symbol_count) {
  return symbol_count + kPipelineFillCycles;
}

inline uint64_t modeled_decode_cycles(uint64_t symbol_count, uint64_t total_steps) {
  return symbol_count + total_steps;
}

struct StatsReport {
  uint64_t original_bytes = 0;
  uint64_t compressed_bytes = 0;
  bool cr_defined = false;  // empty inputs have no ratio
  double compression_ratio = 0.0;
  double entropy_bits = 0.0;
  double cross_entropy_bits = 0.0;
  uint64_t encode_cycles = 0;

  static StatsReport for_encode(uint64_t original_symbols, uint64_t compressed) {
    StatsReport r;
    r.original_bytes = original_symbols;
    r.compressed_bytes = compressed;
    r.cr_defined = original_symbols > 0;
    if (r.cr_defined) r.compression_ratio = double(original_symbols) / double(compressed);
    r.encode_cycles = modeled_encode_cycles(original_symbols);
    return r;
  }
};

}  // namespace ras::corpus
