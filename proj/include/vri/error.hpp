#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vri {

/// Failure kinds raised by the analysis modules. Each kind belongs to one
/// of three classes that map onto CLI exit codes.
enum class ErrorKind {
  // configuration (exit 1)
  bad_config,
  bad_generator_spec,
  // data (exit 2)
  unreadable_file,
  corrupt_input,
  insufficient_data,
  invalid_price,
  degenerate_series,
  empty_after_calendar_filter,
  no_intervals,
  double_scaling,
  no_overlap,
  degenerate_median,
  t_max_too_large,
  // numeric (exit 3)
  underdetermined_fit,
  fit_failed,
};

enum class ErrorClass { config = 1, data = 2, numeric = 3 };

ErrorClass error_class(ErrorKind kind) noexcept;

/// Short stable name, e.g. "unreadable file". Used in run reports.
std::string_view error_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(error_class(kind_)); }

 private:
  ErrorKind kind_;
};

}  // namespace vri
