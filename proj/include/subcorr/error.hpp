#pragma once

#include <stdexcept>
#include <string>

namespace subcorr {

enum class ErrorKind {
  InvalidParameter,
  SampleTooSmall,
  Infeasible,
  InvalidMapping,
  Parse,
  Data,
  Io,
  Internal,
};

// All library failures are reported through this one exception type; the
// kind decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// 0 success, 2 invalid parameters / bad input, 3 infeasible budget, 4 I/O.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Infeasible:
      return 3;
    case ErrorKind::Io:
      return 4;
    case ErrorKind::Internal:
      return 1;
    default:
      return 2;
  }
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::SampleTooSmall: return "sample-too-small";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::InvalidMapping: return "invalid-mapping";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::Data: return "data-error";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::Internal: return "internal-error";
  }
  return "error";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace subcorr
