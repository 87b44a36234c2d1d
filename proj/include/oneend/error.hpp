#pragma once

#include <stdexcept>
#include <string>

namespace oneend {

// Failure categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
  Validation,       // malformed input, unknown letters, invalid graphs of groups
  Precondition,     // an operation was called on input outside its contract
  SearchExhausted,  // a bounded search ended without a result (not a disproof)
  CapExceeded,      // a configured size cap (rank, degree) was hit
  Contract,         // an internal invariant failed; indicates a bug
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::SearchExhausted: return "search-exhausted";
    case ErrorKind::CapExceeded: return "cap-exceeded";
    case ErrorKind::Contract: return "contract";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace oneend
