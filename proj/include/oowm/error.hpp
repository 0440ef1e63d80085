#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oowm {

// Error kinds raised by library operations. Parse failures are not here:
// they are returned as ParseError values (see parser.hpp).
enum class ErrorKind {
  service_unavailable,
  dimension_mismatch,
  empty_input,
  text_too_long,
  group_too_small,
  non_finite_reward,
  empty_samples,
  invalid_clip,
  invalid_ratio,
  reference_parse_error,
  missing_structured_prediction,
  invalid_paradigm,
  io_error,
  schema_error,
  config_error,
};

std::string_view to_string(ErrorKind kind);

// Infrastructure failures are retryable by a caller; everything else is a
// defect in the input data or configuration.
inline bool is_infrastructure(ErrorKind kind) {
  return kind == ErrorKind::service_unavailable;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace oowm
