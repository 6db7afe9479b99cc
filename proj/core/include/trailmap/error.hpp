#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trailmap {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kFailedPrecondition,
  kUnavailable,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Base exception for all library errors. The code drives CLI exit codes and
// HTTP status mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Error invalid_argument(const std::string& message) {
  return Error(ErrorCode::kInvalidArgument, message);
}
inline Error not_found(const std::string& message) {
  return Error(ErrorCode::kNotFound, message);
}
inline Error failed_precondition(const std::string& message) {
  return Error(ErrorCode::kFailedPrecondition, message);
}
inline Error io_error(const std::string& message) {
  return Error(ErrorCode::kIo, message);
}

}  // namespace trailmap
