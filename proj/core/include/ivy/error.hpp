#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ivy {

// Machine-readable error codes. The HTTP layer reports these verbatim in
// error payloads, so renaming one is a wire-format change.
enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kValidation,
  kNotFound,
  kDimensionMismatch,
  kTransport,
  kRateLimited,
  kEmptyCompletion,
  kRejected,
  kIo,
  kConfig,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ivy
