#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smg {

enum class Errc {
  invalid_argument,   // precondition / invariant violation
  io,                 // sink or source failure
  bad_magic,
  bad_version,
  bad_kind,
  truncated,
  trailing_bytes,
  non_finite,
  out_of_range,
  bad_trailer,
  dimension_mismatch,
  undefined_correlation,
  insufficient_valleys,
  wrong_kind,
  format,             // malformed text input (CSV / JSON)
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::io: return "i/o error";
    case Errc::bad_magic: return "bad magic";
    case Errc::bad_version: return "unsupported version";
    case Errc::bad_kind: return "bad frame kind";
    case Errc::truncated: return "truncated";
    case Errc::trailing_bytes: return "trailing bytes";
    case Errc::non_finite: return "non-finite value";
    case Errc::out_of_range: return "value out of range";
    case Errc::bad_trailer: return "bad trailer";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::undefined_correlation: return "undefined correlation";
    case Errc::insufficient_valleys: return "insufficient valleys";
    case Errc::wrong_kind: return "wrong kind";
    case Errc::format: return "format error";
  }
  return "unknown";
}

/// Every failure raised by the library. `code()` is stable and what tests and
/// the CLI dispatch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, Errc code, const char* message) {
  if (!condition) fail(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace smg
