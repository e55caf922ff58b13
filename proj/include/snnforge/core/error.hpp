#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace snnforge {

enum class ErrorCode {
  validation_failed,
  unknown_model,
  shape_mismatch,
  duplicate_name,
  non_differentiable_op,
  non_finite_value,
  non_finite_gradient,
  parse_error,
  schema_error,
  version_mismatch,
  checksum_error,
  io_error,
  out_of_memory,
  invalid_argument,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::validation_failed: return "ValidationFailed";
    case ErrorCode::unknown_model: return "UnknownModel";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::duplicate_name: return "DuplicateName";
    case ErrorCode::non_differentiable_op: return "NonDifferentiableOp";
    case ErrorCode::non_finite_value: return "NonFiniteValue";
    case ErrorCode::non_finite_gradient: return "NonFiniteGradient";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::schema_error: return "SchemaError";
    case ErrorCode::version_mismatch: return "VersionMismatch";
    case ErrorCode::checksum_error: return "ChecksumError";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::out_of_memory: return "OutOfMemory";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

// All library failures are reported through this type; `subject` names the
// offending variable, key, path or file.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& detail = {})
      : std::runtime_error(std::string(to_string(code)) + "(" + subject + ")" +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code),
        subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace snnforge
