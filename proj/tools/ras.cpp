// ras: mixed-precision rANS codec with prediction-guided decoding.
//
// Subcommands: encode, decode, stats, bench, gen. See --help per subcommand
// and the README for the report key reference.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ras/ras.hpp"

namespace fs = std::filesystem;
using namespace ras;

namespace {

// Flag misuse distinct from runtime failures: exits 2 instead of 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

class Report {
 public:
  explicit Report(bool machine) : machine_(machine) {}

  void add(const std::string& key, const std::string& value) { rows_.push_back({key, value}); }
  void add(const std::string& key, uint64_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, double value) { add(key, fmt(value)); }

  void print(std::ostream& os) const {
    if (machine_) {
      for (const auto& [k, v] : rows_) os << k << "=" << v << "\n";
      return;
    }
    size_t width = 0;
    for (const auto& [k, v] : rows_) width = std::max(width, k.size());
    for (const auto& [k, v] : rows_) os << "  " << k << std::string(width - k.size() + 2, ' ') << v << "\n";
  }

 private:
  bool machine_;
  std::vector<std::pair<std::string, std::string>> rows_;
};

corpus::Layout parse_layout(const std::string& s) {
  if (s == "raw") return corpus::Layout::raw();
  if (s == "pgm") return corpus::Layout::pgm();
  if (s.rfind("image:", 0) == 0) {
    const unsigned long w = std::stoul(s.substr(6));
    if (w == 0) throw UsageError("image layout width must be positive");
    return corpus::Layout::image(uint32_t(w));
  }
  throw UsageError("unknown layout '" + s + "' (raw|pgm|image:<W>)");
}

struct TableChoice {
  bool external = false;
  std::string path;
};

TableChoice parse_table(const std::string& s) {
  if (s == "static") return {};
  if (s.rfind("external:", 0) == 0) {
    TableChoice t;
    t.external = true;
    t.path = s.substr(9);
    if (t.path.empty()) throw UsageError("external table needs a path");
    return t;
  }
  throw UsageError("unknown table mode '" + s + "' (static|external:<path>)");
}

specdec::PredictorConfig parse_anchor(const std::string& s, uint32_t delta) {
  specdec::PredictorConfig cfg;
  cfg.delta = delta;
  if (s == "zero") {
    cfg.mode = specdec::AnchorMode::zero;
  } else if (s == "last") {
    cfg.mode = specdec::AnchorMode::last_value;
  } else if (s.rfind("image:", 0) == 0) {
    cfg.mode = specdec::AnchorMode::image;
    const unsigned long w = std::stoul(s.substr(6));
    if (w == 0) throw UsageError("image anchor width must be positive");
    cfg.image_width = uint32_t(w);
  } else {
    throw UsageError("unknown anchor '" + s + "' (image:<W>|last|zero)");
  }
  return cfg;
}

constexpr uint32_t kByteAlphabet = 256;

probtab::ModelSource static_source_for(std::span<const uint8_t> symbols, int prob_bits) {
  if (symbols.empty()) {
    // Degenerate-input policy: an empty stream still gets a valid container;
    // embed a uniform table.
    probtab::Bf16Table t;
    t.probs.assign(kByteAlphabet, probtab::Bf16::from_float(1.0f / float(kByteAlphabet)));
    return probtab::ModelSource::from_static(t, prob_bits);
  }
  return probtab::ModelSource::from_static(corpus::histogram_model(symbols, kByteAlphabet), prob_bits);
}

// ---------------------------------------------------------------------------
// encode
// ---------------------------------------------------------------------------

struct EncodeArgs {
  std::string input, output;
  std::string layout = "raw";
  std::string table = "static";
  int prob_bits = probtab::kDefaultProbBits;
  uint32_t lanes = 1;
  std::string report = "text";
};

int cmd_encode(const EncodeArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto in = corpus::ingest(a.input, parse_layout(a.layout));
  const TableChoice table = parse_table(a.table);

  container::EncodeOptions opt;
  opt.prob_bits = a.prob_bits;
  opt.lane_count = a.lanes;

  std::optional<probtab::ModelSource> source;
  if (table.external) {
    opt.table_mode = container::TableMode::external_adaptive;
    source = probtab::ModelSource::from_rows(probtab::read_table_file(wire::read_file(table.path)),
                                             a.prob_bits);
  } else {
    source = static_source_for(in.symbols, a.prob_bits);
  }

  const auto out = container::encode(in.symbols, *source, opt);
  wire::write_file(a.output, out.bytes);

  auto stats = corpus::StatsReport::for_encode(in.symbols.size(), out.bytes.size());
  if (stats.cr_defined) {
    stats.entropy_bits = corpus::compute_entropy(in.symbols);
    stats.cross_entropy_bits =
        source->is_adaptive() ? corpus::compute_cross_entropy_adaptive(in.symbols, *source)
                              : corpus::compute_cross_entropy(in.symbols, source->model_for(0));
  }

  Report r(a.report == "machine");
  r.add("original_bytes", stats.original_bytes);
  r.add("compressed_bytes", stats.compressed_bytes);
  r.add("payload_bytes", out.payload_bytes);
  if (stats.cr_defined) {
    r.add("compression_ratio", stats.compression_ratio);
    r.add("entropy_bits", stats.entropy_bits);
    r.add("cross_entropy_bits", stats.cross_entropy_bits);
  } else {
    r.add("compression_ratio", "n/a");
    r.add("entropy_bits", "n/a");
    r.add("cross_entropy_bits", "n/a");
  }
  r.add("symbols", stats.original_bytes);
  r.add("lanes", uint64_t(a.lanes));
  r.add("prob_bits", uint64_t(a.prob_bits));
  // modeled, not measured: pipeline fill plus one cycle per symbol
  r.add("encode_cycles_modeled", stats.encode_cycles);
  r.add("wall_ms", elapsed_ms(start));
  r.print(std::cout);
  return 0;
}

// ---------------------------------------------------------------------------
// decode
// ---------------------------------------------------------------------------

struct DecodeArgs {
  std::string input, output;
  bool guided = false;
  bool shadow = false;
  uint32_t delta = 8;
  std::string anchor = "zero";
  std::string table = "static";
  std::string report = "text";
};

int cmd_decode(const DecodeArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto bytes = wire::read_file(a.input);

  container::DecodeOptions opt;
  opt.guided = a.guided;
  opt.shadow_baseline = a.shadow;
  opt.predictor = parse_anchor(a.anchor, a.delta);
  if (opt.guided && opt.predictor.mode == specdec::AnchorMode::image &&
      opt.predictor.image_width == 0)
    throw UsageError("image anchor requires a width");

  const TableChoice table = parse_table(a.table);
  std::optional<probtab::ModelSource> external;
  const probtab::ModelSource* external_ptr = nullptr;
  if (table.external) {
    const auto parsed = container::parse_container(bytes);  // need prob_bits for the conversion
    external = probtab::ModelSource::from_rows(probtab::read_table_file(wire::read_file(table.path)),
                                               parsed.header.prob_bits);
    external_ptr = &*external;
  }

  const auto out = container::decode(bytes, opt, external_ptr);
  wire::write_file(a.output, out.symbols);

  Report r(a.report == "machine");
  r.add("symbols", uint64_t(out.symbols.size()));
  r.add("output_bytes", uint64_t(out.symbols.size()));
  r.add("lanes", uint64_t(out.header.lane_count));
  r.add("prob_bits", uint64_t(out.header.prob_bits));
  const auto& s = out.stats;
  const bool any = out.symbols.size() > 0;
  if (out.ran_baseline) {
    r.add("baseline_avg_steps", any ? fmt(double(s.total_steps_baseline) / double(out.symbols.size()))
                                    : "n/a");
  }
  if (out.ran_guided) {
    r.add("guided_avg_steps", any ? fmt(s.avg_steps()) : "n/a");
    r.add("guided_avg_search_steps", any ? fmt(s.avg_search_steps()) : "n/a");
    r.add("gate_hit_rate", any ? fmt(s.gate_hit_rate()) : "n/a");
    r.add("anchor_exact_rate", any ? fmt(s.anchor_exact_rate()) : "n/a");
    r.add("fallbacks", s.fallbacks);
    r.add("nu", any && s.gate_hits ? fmt(s.measured_overhead()) : "n/a");
  }
  if (out.ran_baseline && out.ran_guided) {
    // step_ratio compares per-symbol search depth; the accounted ratio also
    // charges the anchor and gate probes
    r.add("step_ratio",
          any && s.total_steps_baseline
              ? fmt(double(s.total_search_steps) / double(s.total_steps_baseline))
              : "n/a");
    r.add("step_ratio_accounted",
          any && s.total_steps_baseline
              ? fmt(double(s.total_steps_guided) / double(s.total_steps_baseline))
              : "n/a");
  }
  const uint64_t steps = out.ran_guided ? s.total_steps_guided : s.total_steps_baseline;
  r.add("decode_cycles_modeled", corpus::modeled_decode_cycles(out.symbols.size(), steps));
  r.add("wall_ms", elapsed_ms(start));
  r.print(std::cout);
  return 0;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

struct StatsArgs {
  std::string input;
  std::string layout = "raw";
  std::string report = "text";
};

int cmd_stats(const StatsArgs& a) {
  const auto bytes = wire::read_file(a.input);
  Report r(a.report == "machine");
  const bool is_container = bytes.size() >= 4 && bytes[0] == 'R' && bytes[1] == 'A' &&
                            bytes[2] == 'S' && bytes[3] == 'C';
  if (is_container) {
    const auto parsed = container::parse_container(bytes);
    const auto& h = parsed.header;
    r.add("kind", "container");
    r.add("version", uint64_t(h.version));
    r.add("prob_bits", uint64_t(h.prob_bits));
    r.add("lanes", uint64_t(h.lane_count));
    r.add("table_mode", h.table_mode == container::TableMode::embedded_static ? "embedded_static"
                                                                              : "external_adaptive");
    r.add("alphabet", uint64_t(h.alphabet));
    r.add("symbols", h.symbol_count);
    uint64_t payload = 0;
    for (uint32_t len : h.payload_len) payload += len;
    r.add("payload_bytes", payload);
    for (size_t i = 0; i < h.payload_len.size(); ++i)
      r.add("lane" + std::to_string(i) + "_bytes", uint64_t(h.payload_len[i]));
  } else {
    const auto in = corpus::ingest_bytes(bytes, parse_layout(a.layout));
    r.add("kind", "data");
    r.add("bytes", uint64_t(in.symbols.size()));
    if (!in.symbols.empty()) {
      r.add("entropy_bits", corpus::compute_entropy(in.symbols));
      std::vector<bool> seen(256, false);
      for (uint8_t s : in.symbols) seen[s] = true;
      r.add("distinct_symbols", uint64_t(std::count(seen.begin(), seen.end(), true)));
    } else {
      r.add("entropy_bits", "n/a");
      r.add("distinct_symbols", uint64_t(0));
    }
    if (in.image) {
      r.add("width", uint64_t(in.image->width));
      r.add("height", uint64_t(in.image->height));
    }
  }
  r.print(std::cout);
  return 0;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string output;
  uint32_t width = 64, height = 64, noise = 8;
  uint64_t seed = 1;
  std::string format = "pgm";
};

int cmd_gen(const GenArgs& a) {
  const auto img = corpus::gen_gradient_image(a.width, a.height, a.noise, a.seed);
  if (a.format == "pgm") {
    const auto bytes = corpus::write_pgm(img);
    wire::write_file(a.output, bytes);
  } else if (a.format == "raw") {
    wire::write_file(a.output, img.pixels);
  } else {
    throw UsageError("unknown format '" + a.format + "' (pgm|raw)");
  }
  std::cout << a.output << " " << img.width << "x" << img.height << " noise " << a.noise << " seed "
            << a.seed << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string dir;
  uint32_t gen_count = 0;
  uint32_t width = 64, height = 64, noise = 8;
  uint64_t seed = 1;
  int prob_bits = probtab::kDefaultProbBits;
  uint32_t lanes = 1;
  uint32_t delta = 8;
  std::string anchor;  // empty: auto per input
  bool sweep_delta = false;
  std::string report = "text";
};

struct BenchInput {
  std::string name;
  std::vector<uint8_t> symbols;
  std::optional<uint32_t> image_width;
};

struct BenchRow {
  std::string name;
  uint64_t bytes = 0, compressed = 0;
  double cr = 0, h = 0, hq = 0;
  specdec::SearchStats stats;
  uint64_t encode_cycles = 0, decode_cycles = 0;
  double wall_ms = 0;
};

BenchRow bench_one(const BenchInput& in, const BenchArgs& a, uint32_t delta) {
  const auto start = std::chrono::steady_clock::now();
  BenchRow row;
  row.name = in.name;
  row.bytes = in.symbols.size();

  const auto source = static_source_for(in.symbols, a.prob_bits);
  container::EncodeOptions eopt;
  eopt.prob_bits = a.prob_bits;
  eopt.lane_count = a.lanes;
  const auto encoded = container::encode(in.symbols, source, eopt);
  row.compressed = encoded.bytes.size();
  row.cr = row.bytes ? double(row.bytes) / double(row.compressed) : 0.0;
  if (row.bytes) {
    row.h = corpus::compute_entropy(in.symbols);
    row.hq = corpus::compute_cross_entropy(in.symbols, source.model_for(0));
  }

  container::DecodeOptions dopt;
  dopt.guided = true;
  dopt.shadow_baseline = true;
  if (!a.anchor.empty()) {
    dopt.predictor = parse_anchor(a.anchor, delta);
  } else if (in.image_width) {
    dopt.predictor.mode = specdec::AnchorMode::image;
    dopt.predictor.image_width = *in.image_width;
    dopt.predictor.delta = delta;
  } else {
    dopt.predictor.mode = specdec::AnchorMode::last_value;
    dopt.predictor.delta = delta;
  }
  const auto decoded = container::decode(encoded.bytes, dopt);
  if (decoded.symbols != in.symbols) throw std::logic_error("bench round-trip mismatch");
  row.stats = decoded.stats;
  row.encode_cycles = corpus::modeled_encode_cycles(row.bytes);
  row.decode_cycles = corpus::modeled_decode_cycles(row.bytes, row.stats.total_steps_guided);
  row.wall_ms = elapsed_ms(start);
  return row;
}

void print_bench_rows(const std::vector<BenchRow>& rows, uint32_t delta, const BenchArgs& a) {
  const bool machine = a.report == "machine";
  BenchRow total;
  total.name = "aggregate";
  for (const auto& r : rows) {
    total.bytes += r.bytes;
    total.compressed += r.compressed;
    total.stats.merge(r.stats);
    total.encode_cycles += r.encode_cycles;
    total.decode_cycles += r.decode_cycles;
    total.wall_ms += r.wall_ms;
    total.h += r.h * double(r.bytes);
    total.hq += r.hq * double(r.bytes);
  }
  total.cr = total.bytes ? double(total.bytes) / double(total.compressed) : 0.0;
  if (total.bytes) {
    total.h /= double(total.bytes);
    total.hq /= double(total.bytes);
  }

  const auto emit = [&](const BenchRow& r, bool aggregate) {
    const uint64_t n = r.stats.symbols_decoded;
    const double base = n ? double(r.stats.total_steps_baseline) / double(n) : 0.0;
    if (machine) {
      const std::string prefix =
          (aggregate ? std::string("aggregate") : "file." + r.name) + ".delta" + std::to_string(delta) + ".";
      std::cout << prefix << "bytes=" << r.bytes << "\n"
                << prefix << "compressed_bytes=" << r.compressed << "\n"
                << prefix << "compression_ratio=" << (r.bytes ? fmt(r.cr) : "n/a") << "\n"
                << prefix << "entropy_bits=" << fmt(r.h) << "\n"
                << prefix << "cross_entropy_bits=" << fmt(r.hq) << "\n"
                << prefix << "baseline_avg_steps=" << fmt(base) << "\n"
                << prefix << "guided_avg_steps=" << fmt(r.stats.avg_steps()) << "\n"
                << prefix << "guided_avg_search_steps=" << fmt(r.stats.avg_search_steps()) << "\n"
                << prefix << "gate_hit_rate=" << fmt(r.stats.gate_hit_rate()) << "\n"
                << prefix << "anchor_exact_rate=" << fmt(r.stats.anchor_exact_rate()) << "\n"
                << prefix << "fallbacks=" << r.stats.fallbacks << "\n"
                << prefix << "encode_cycles_modeled=" << r.encode_cycles << "\n"
                << prefix << "decode_cycles_modeled=" << r.decode_cycles << "\n"
                << prefix << "wall_ms=" << fmt(r.wall_ms) << "\n";
    } else {
      std::cout << "  delta=" << delta << " " << (aggregate ? "AGGREGATE" : r.name) << ": bytes=" << r.bytes
                << " cr=" << fmt(r.cr) << " H=" << fmt(r.h) << " Hq=" << fmt(r.hq)
                << " base_steps=" << fmt(base) << " guided_steps=" << fmt(r.stats.avg_steps())
                << " search_steps=" << fmt(r.stats.avg_search_steps())
                << " hit=" << fmt(r.stats.gate_hit_rate())
                << " exact=" << fmt(r.stats.anchor_exact_rate()) << " fallbacks=" << r.stats.fallbacks
                << " enc_cycles=" << r.encode_cycles << " dec_cycles=" << r.decode_cycles
                << " wall_ms=" << fmt(r.wall_ms) << "\n";
    }
  };
  for (const auto& r : rows) emit(r, false);
  emit(total, true);
}

int cmd_bench(const BenchArgs& a) {
  std::vector<BenchInput> inputs;
  if (!a.dir.empty()) {
    std::vector<fs::path> paths;
    if (!fs::is_directory(a.dir)) fail(Err::io_error, a.dir + " is not a directory");
    for (const auto& e : fs::directory_iterator(a.dir))
      if (e.is_regular_file()) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
      BenchInput in;
      in.name = p.filename().string();
      const bool pgm = p.extension() == ".pgm";
      const auto ing = corpus::ingest(p.string(), pgm ? corpus::Layout::pgm() : corpus::Layout::raw());
      in.symbols = ing.symbols;
      if (ing.image) in.image_width = ing.image->width;
      inputs.push_back(std::move(in));
    }
  } else if (a.gen_count > 0) {
    for (uint32_t i = 0; i < a.gen_count; ++i) {
      BenchInput in;
      in.name = "gradient" + std::to_string(i);
      const auto img = corpus::gen_gradient_image(a.width, a.height, a.noise, a.seed + i);
      in.symbols = img.pixels;
      in.image_width = img.width;
      inputs.push_back(std::move(in));
    }
  } else {
    throw UsageError("bench needs --dir or --gen-count");
  }
  if (inputs.empty()) fail(Err::empty_input, "no bench inputs");

  const std::vector<uint32_t> deltas =
      a.sweep_delta ? std::vector<uint32_t>{0, 1, 2, 4, 8, 16, 32} : std::vector<uint32_t>{a.delta};
  for (uint32_t delta : deltas) {
    std::vector<BenchRow> rows;
    rows.reserve(inputs.size());
    for (const auto& in : inputs) rows.push_back(bench_one(in, a, delta));
    print_bench_rows(rows, delta, a);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed-precision rANS codec with prediction-guided decoding"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "compress a file into a container");
  enc_cmd->add_option("-i,--input", enc.input)->required();
  enc_cmd->add_option("-o,--output", enc.output)->required();
  enc_cmd->add_option("--layout", enc.layout, "raw|pgm|image:<W>");
  enc_cmd->add_option("--n", enc.prob_bits, "fixed-point precision (1..16)");
  enc_cmd->add_option("--lanes", enc.lanes, "coder lanes (1..64)");
  enc_cmd->add_option("--table", enc.table, "static|external:<path>");
  enc_cmd->add_option("--report", enc.report, "text|machine");

  DecodeArgs dec;
  auto* dec_cmd = app.add_subcommand("decode", "decompress a container");
  dec_cmd->add_option("-i,--input", dec.input)->required();
  dec_cmd->add_option("-o,--output", dec.output)->required();
  dec_cmd->add_flag("--guided", dec.guided, "prediction-guided symbol search");
  dec_cmd->add_flag("--shadow-baseline", dec.shadow, "also run the baseline and compare");
  dec_cmd->add_option("--delta", dec.delta, "search window half-width");
  dec_cmd->add_option("--anchor", dec.anchor, "image:<W>|last|zero");
  dec_cmd->add_option("--table", dec.table, "static|external:<path>");
  dec_cmd->add_option("--report", dec.report, "text|machine");

  StatsArgs st;
  auto* st_cmd = app.add_subcommand("stats", "inspect a container or data file");
  st_cmd->add_option("-i,--input", st.input)->required();
  st_cmd->add_option("--layout", st.layout, "raw|pgm|image:<W>");
  st_cmd->add_option("--report", st.report, "text|machine");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic gradient image");
  gen_cmd->add_option("-o,--output", gen.output)->required();
  gen_cmd->add_option("--width", gen.width);
  gen_cmd->add_option("--height", gen.height);
  gen_cmd->add_option("--noise", gen.noise, "uniform noise amplitude (0..64)");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--format", gen.format, "pgm|raw");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "compression/step metrics over a corpus");
  bench_cmd->add_option("--dir", bench.dir, "directory of input files");
  bench_cmd->add_option("--gen-count", bench.gen_count, "generate this many gradient images");
  bench_cmd->add_option("--width", bench.width);
  bench_cmd->add_option("--height", bench.height);
  bench_cmd->add_option("--noise", bench.noise);
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--n", bench.prob_bits);
  bench_cmd->add_option("--lanes", bench.lanes);
  bench_cmd->add_option("--delta", bench.delta);
  bench_cmd->add_option("--anchor", bench.anchor, "image:<W>|last|zero (default: per input)");
  bench_cmd->add_flag("--sweep-delta", bench.sweep_delta, "iterate delta over {0,1,2,4,8,16,32}");
  bench_cmd->add_option("--report", bench.report, "text|machine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*enc_cmd) return cmd_encode(enc);
    if (*dec_cmd) return cmd_decode(dec);
    if (*st_cmd) return cmd_stats(st);
    if (*gen_cmd) return cmd_gen(gen);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
