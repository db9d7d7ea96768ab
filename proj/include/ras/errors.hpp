#pragma once

#include <stdexcept>
#include <string>

namespace ras {

enum class Err {
  bad_magic,
  unsupported_version,
  truncated_stream,
  table_invariant,
  infeasible_alphabet,
  invalid_probability,
  invalid_frequency,
  symbol_out_of_range,
  corrupt_state,
  lane_count_out_of_range,
  unsupported_format,
  bad_dimensions,
  empty_input,
  io_error,
  bad_config,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::bad_magic: return "BadMagic";
    case Err::unsupported_version: return "UnsupportedVersion";
    case Err::truncated_stream: return "TruncatedStream";
    case Err::table_invariant: return "TableInvariantViolation";
    case Err::infeasible_alphabet: return "InfeasibleAlphabet";
    case Err::invalid_probability: return "InvalidProbability";
    case Err::invalid_frequency: return "InvalidFrequency";
    case Err::symbol_out_of_range: return "SymbolOutOfRange";
    case Err::corrupt_state: return "CorruptState";
    case Err::lane_count_out_of_range: return "LaneCountOutOfRange";
    case Err::unsupported_format: return "UnsupportedFormat";
    case Err::bad_dimensions: return "BadDimensions";
    case Err::empty_input: return "EmptyInput";
    case Err::io_error: return "IoError";
    case Err::bad_config: return "BadConfig";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}

  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace ras
