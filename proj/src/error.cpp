#include "vri/error.hpp"

namespace vri {

ErrorClass error_class(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::bad_config:
    case ErrorKind::bad_generator_spec:
      return ErrorClass::config;
    case ErrorKind::underdetermined_fit:
    case ErrorKind::fit_failed:
      return ErrorClass::numeric;
    default:
      return ErrorClass::data;
  }
}

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::bad_config: return "bad config";
    case ErrorKind::bad_generator_spec: return "bad generator spec";
    case ErrorKind::unreadable_file: return "unreadable file";
    case ErrorKind::corrupt_input: return "corrupt input";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::invalid_price: return "invalid price";
    case ErrorKind::degenerate_series: return "degenerate series";
    case ErrorKind::empty_after_calendar_filter: return "empty after calendar filter";
    case ErrorKind::no_intervals: return "no intervals";
    case ErrorKind::double_scaling: return "double scaling";
    case ErrorKind::no_overlap: return "no overlap";
    case ErrorKind::degenerate_median: return "degenerate: no median split";
    case ErrorKind::t_max_too_large: return "t_max too large";
    case ErrorKind::underdetermined_fit: return "underdetermined fit";
    case ErrorKind::fit_failed: return "fit failed";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(detail.empty() ? std::string(error_name(kind))
                                        : std::string(error_name(kind)) + ": " + detail),
      kind_(kind) {}

}  // namespace vri
