#include "ssimwm/error.hpp"

namespace ssimwm {

std::string_view categoryName(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::InvalidArgument: return "invalid_argument";
    case ErrorCategory::DimensionMismatch: return "dimension_mismatch";
    case ErrorCategory::OutOfBounds: return "out_of_bounds";
    case ErrorCategory::ConstraintViolation: return "constraint_violation";
    case ErrorCategory::MalformedHeader: return "malformed_header";
    case ErrorCategory::UnsupportedFormat: return "unsupported_format";
    case ErrorCategory::TruncatedData: return "truncated_data";
    case ErrorCategory::Io: return "io_error";
  }
  return "unknown";
}

}  // namespace ssimwm
