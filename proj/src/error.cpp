#include "rdsv/error.hpp"

namespace rdsv {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::parse: return "parse";
    case Errc::format: return "format";
    case Errc::io: return "io";
    case Errc::bad_magic: return "bad_magic";
    case Errc::truncated: return "truncated";
    case Errc::dim_mismatch: return "dim_mismatch";
    case Errc::count_mismatch: return "count_mismatch";
    case Errc::norm: return "norm";
    case Errc::duplicate: return "duplicate";
    case Errc::rate: return "rate";
    case Errc::range: return "range";
    case Errc::bounds: return "bounds";
    case Errc::length: return "length";
    case Errc::config: return "config";
    case Errc::build: return "build";
    case Errc::file_id_mismatch: return "file_id_mismatch";
    case Errc::undefined_der: return "undefined_der";
    case Errc::infeasible: return "infeasible";
    case Errc::embedder: return "embedder";
  }
  return "unknown";
}

bool is_data_error(Errc code) noexcept {
  switch (code) {
    case Errc::parse:
    case Errc::format:
    case Errc::io:
    case Errc::bad_magic:
    case Errc::truncated:
    case Errc::dim_mismatch:
    case Errc::count_mismatch:
    case Errc::norm:
    case Errc::duplicate:
    case Errc::rate:
    case Errc::file_id_mismatch:
    case Errc::embedder:
      return true;
    default:
      return false;
  }
}

}  // namespace rdsv
