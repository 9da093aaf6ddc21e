#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vtpalm {

enum class ErrorKind {
  MissingFile,
  UnsupportedFormat,
  CorruptData,
  IoFailure,
  InvalidArgument,
  DimensionMismatch,
  EmptyMask,
  InsufficientSamples,
  OutOfRange,
  InsufficientSupport,
  BadFit,
  InvalidEvent,
  WrongMode,
  NonFiniteLoss,
  Degenerate,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace vtpalm
