#include "ivy/error.hpp"

namespace ivy {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kValidation: return "validation-error";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kTransport: return "transport-error";
    case ErrorCode::kRateLimited: return "rate-limited";
    case ErrorCode::kEmptyCompletion: return "empty-completion";
    case ErrorCode::kRejected: return "rejected";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kConfig: return "config-error";
  }
  return "unknown";
}

}  // namespace ivy
