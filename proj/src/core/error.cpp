#include "vtpalm/error.hpp"

namespace vtpalm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "missing-file";
    case ErrorKind::UnsupportedFormat: return "unsupported-format";
    case ErrorKind::CorruptData: return "corrupt-data";
    case ErrorKind::IoFailure: return "io-failure";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::EmptyMask: return "empty-mask";
    case ErrorKind::InsufficientSamples: return "insufficient-samples";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::InsufficientSupport: return "insufficient-support";
    case ErrorKind::BadFit: return "bad-fit";
    case ErrorKind::InvalidEvent: return "invalid-event";
    case ErrorKind::WrongMode: return "wrong-mode";
    case ErrorKind::NonFiniteLoss: return "non-finite-loss";
    case ErrorKind::Degenerate: return "degenerate";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace vtpalm
