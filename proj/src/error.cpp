#include "oowm/error.hpp"

namespace oowm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::service_unavailable: return "service_unavailable";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::text_too_long: return "text_too_long";
    case ErrorKind::group_too_small: return "group_too_small";
    case ErrorKind::non_finite_reward: return "non_finite_reward";
    case ErrorKind::empty_samples: return "empty_samples";
    case ErrorKind::invalid_clip: return "invalid_clip";
    case ErrorKind::invalid_ratio: return "invalid_ratio";
    case ErrorKind::reference_parse_error: return "reference_parse_error";
    case ErrorKind::missing_structured_prediction: return "missing_structured_prediction";
    case ErrorKind::invalid_paradigm: return "invalid_paradigm";
    case ErrorKind::io_error: return "io_error";
    case ErrorKind::schema_error: return "schema_error";
    case ErrorKind::config_error: return "config_error";
  }
  return "unknown";
}

}  // namespace oowm
