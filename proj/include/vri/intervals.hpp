#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "vri/exec.hpp"
#include "vri/series.hpp"

namespace vri {

/// Volatility threshold q, in the normalization units of the series.
class Threshold {
 public:
  explicit Threshold(double q);
  double value() const noexcept { return q_; }

 private:
  double q_;
};

enum class BoundaryPolicy { within_series, per_session };

BoundaryPolicy parse_boundary_policy(std::string_view text);
std::string_view to_string(BoundaryPolicy policy) noexcept;

/// Return intervals tau (in sampling steps) between consecutive exceedances
/// vol[i] >= q.
struct IntervalSeries {
  std::vector<std::int64_t> taus;
  double q = 0.0;
  std::int64_t tau_sum = 0;
  double mean_tau = 0.0;  // tau_sum / taus.size(); NaN when empty
  std::size_t n_exceedances = 0;
  std::size_t source_length = 0;
  bool too_few_exceedances = false;

  std::size_t size() const noexcept { return taus.size(); }
  bool empty() const noexcept { return taus.empty(); }

  /// Builds a series from raw interval values (e.g. read back from CSV).
  static IntervalSeries from_taus(std::vector<std::int64_t> taus, double q = 0.0);

  std::vector<double> as_doubles() const;
};

IntervalSeries extract_intervals(const VolatilitySeries& vol, Threshold q,
                                 BoundaryPolicy boundary = BoundaryPolicy::within_series,
                                 Exec exec = Exec::parallel);

IntervalSeries extract_intervals(std::span<const double> values, Threshold q,
                                 Exec exec = Exec::parallel);

struct MeanIntervalPoint {
  double q = 0.0;
  double mean_tau = 0.0;  // NaN when fewer than two exceedances
  std::size_t n_intervals = 0;
};

std::vector<MeanIntervalPoint> mean_interval_curve(const VolatilitySeries& vol,
                                                   std::span<const double> qs,
                                                   BoundaryPolicy boundary = BoundaryPolicy::within_series);

/// Empirical quantile (linear interpolation between order statistics).
double quantile(std::span<const double> values, double p);

}  // namespace vri
