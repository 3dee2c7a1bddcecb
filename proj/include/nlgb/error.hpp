#pragma once

#include <stdexcept>
#include <string>

namespace nlgb {

// Failure categories. The numeric values are mirrored by nlgb_status in nlgb.h.
enum class ErrorCode : int {
  InvalidArgument = 1,
  Normalization = 2,
  Bounds = 3,
  Numeric = 4,
  Io = 5,
  InsufficientData = 6,
  SingularFit = 7,
  Parse = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nlgb
