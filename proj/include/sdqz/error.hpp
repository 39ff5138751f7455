#pragma once

#include <stdexcept>
#include <string>

namespace sdqz {

enum class Errc {
  invalid_argument,
  nonfinite_input,
  corrupt_data,
  short_read,
  bad_magic,
  unsupported_version,
  unsupported_dtype,
  integrity,
  length_mismatch,
  io,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::nonfinite_input: return "nonfinite input";
    case Errc::corrupt_data: return "corrupt data";
    case Errc::short_read: return "short read";
    case Errc::bad_magic: return "bad magic";
    case Errc::unsupported_version: return "unsupported version";
    case Errc::unsupported_dtype: return "unsupported dtype";
    case Errc::integrity: return "integrity";
    case Errc::length_mismatch: return "length mismatch";
    case Errc::io: return "i/o";
  }
  return "unknown";
}

// All library failures are reported through this type. The code is stable
// and meant for programmatic checks; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sdqz
