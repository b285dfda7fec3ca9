#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssimwm {

// Machine-readable failure classes; the CLI prints the name on stderr.
enum class ErrorCategory {
  InvalidArgument,
  DimensionMismatch,
  OutOfBounds,
  ConstraintViolation,
  MalformedHeader,
  UnsupportedFormat,
  TruncatedData,
  Io,
};

std::string_view categoryName(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace ssimwm
