#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace vri {

/// Minutes since 1970-01-01 00:00, exchange-local wall clock.
using MinuteStamp = std::int64_t;

inline constexpr int kMinutesPerDay = 1440;

inline constexpr int minute_of_day(MinuteStamp t) noexcept {
  const auto m = t % kMinutesPerDay;
  return static_cast<int>(m < 0 ? m + kMinutesPerDay : m);
}

/// One-minute price observations. Immutable once constructed; the
/// constructor enforces ordering, positivity and session monotonicity.
/// Calendar membership is checked by `ingest` when bars are produced.
class MinuteBarSeries {
 public:
  MinuteBarSeries() = default;
  MinuteBarSeries(std::vector<MinuteStamp> timestamps, std::vector<double> prices,
                  std::vector<std::int64_t> session_ids);

  std::span<const MinuteStamp> timestamps() const noexcept { return timestamps_; }
  std::span<const double> prices() const noexcept { return prices_; }
  std::span<const std::int64_t> session_ids() const noexcept { return session_ids_; }
  std::size_t size() const noexcept { return prices_.size(); }
  bool empty() const noexcept { return prices_.empty(); }

  /// Same series with every price multiplied by `factor` (> 0).
  MinuteBarSeries rescaled(double factor) const;

 private:
  std::vector<MinuteStamp> timestamps_;
  std::vector<double> prices_;
  std::vector<std::int64_t> session_ids_;
};

enum class GapPolicy { drop_overnight, keep_overnight };

/// Log-returns Z(t) = ln y(t) - ln y(t-1). `session_ids` and `minute_of_day`
/// refer to the later bar of each pair and may be empty for returns that
/// did not come from a bar series.
struct ReturnSeries {
  std::vector<double> values;
  std::vector<std::int64_t> session_ids;
  std::vector<int> minute_of_day;
  std::size_t omitted_pairs = 0;
};

enum class NormMode { global_std, intraday_std };

struct Normalization {
  NormMode mode = NormMode::global_std;
  double sigma = 0.0;
  /// Mean |Z| per minute-of-day; only filled for intraday_std.
  std::vector<double> intraday_profile;
};

/// Normalized volatility |Z| / sigma, in units of return standard deviations.
struct VolatilitySeries {
  std::vector<double> values;
  std::vector<std::int64_t> session_ids;
  Normalization normalization;

  std::size_t size() const noexcept { return values.size(); }
};

ReturnSeries log_returns(const MinuteBarSeries& bars, GapPolicy gap = GapPolicy::drop_overnight);

/// Treats `values` as one uninterrupted return series.
ReturnSeries returns_from_values(std::vector<double> values);

VolatilitySeries normalize_volatility(const ReturnSeries& returns,
                                      NormMode mode = NormMode::global_std);

/// Population standard deviation (divides by N).
double population_std(std::span<const double> values);

GapPolicy parse_gap_policy(std::string_view text);
NormMode parse_norm_mode(std::string_view text);
std::string_view to_string(GapPolicy policy) noexcept;
std::string_view to_string(NormMode mode) noexcept;

}  // namespace vri
