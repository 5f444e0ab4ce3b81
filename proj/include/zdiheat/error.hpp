#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace zdiheat {

enum class ErrorKind {
  kInvalidArgument,   // violated type invariant or precondition
  kConfig,            // malformed experiment configuration
  kIo,
  kOverflowAtOrder,
  kInsufficientData,
  kNearSingular,
  kTruncationFailure,
  kDivergentSeries,
  kUnstableStep,
  kSnapTooLarge,
};

const char* to_string(ErrorKind kind) noexcept;

// Validation-type errors map to CLI exit code 1, everything numeric to 2.
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, int order = -1)
      : std::runtime_error(what), kind_(kind), order_(order) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Derivative order for kOverflowAtOrder, -1 otherwise.
  int order() const noexcept { return order_; }

 private:
  ErrorKind kind_;
  int order_;
};

// Short %g rendering for diagnostics (std::to_string prints fixed-point).
inline std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::kInvalidArgument, what);
}

}  // namespace zdiheat
