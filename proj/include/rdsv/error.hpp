#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdsv {

// Every failure raised by the library carries one of these codes. The CLI maps
// them onto exit codes (data/format -> 3, constraint -> 4).
enum class Errc {
  parse,            // malformed RTTM line
  format,           // unsupported codec / malformed container
  io,               // file cannot be opened or written
  bad_magic,
  truncated,
  dim_mismatch,
  count_mismatch,
  norm,             // vector not unit-norm
  duplicate,        // duplicate speaker block
  rate,             // audio sample rate != 16 kHz
  range,            // window rate outside [0.625, 100]
  bounds,           // index or segment out of range
  length,           // buffer too short
  config,
  build,            // empty reference library
  file_id_mismatch,
  undefined_der,    // no scored reference speech
  infeasible,       // profile constraints cannot be met
  embedder,         // embedder failure at a given window
};

std::string_view errc_name(Errc code) noexcept;

// True for errors caused by bad input data (exit code 3); false for violated
// constraints and configuration (exit code 4).
bool is_data_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace rdsv
