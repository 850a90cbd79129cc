#include "vri/series.hpp"

#include <cmath>
#include <string>

#include "vri/error.hpp"

namespace vri {

MinuteBarSeries::MinuteBarSeries(std::vector<MinuteStamp> timestamps, std::vector<double> prices,
                                 std::vector<std::int64_t> session_ids)
    : timestamps_(std::move(timestamps)),
      prices_(std::move(prices)),
      session_ids_(std::move(session_ids)) {
  if (timestamps_.size() != prices_.size() || session_ids_.size() != prices_.size()) {
    throw Error(ErrorKind::corrupt_input, "bar columns differ in length");
  }
  for (std::size_t i = 0; i < prices_.size(); ++i) {
    if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i])) {
      throw Error(ErrorKind::invalid_price, "bar " + std::to_string(i));
    }
    if (i > 0 && timestamps_[i] <= timestamps_[i - 1]) {
      throw Error(ErrorKind::corrupt_input, "bar timestamps not strictly increasing at " +
                                                std::to_string(i));
    }
    if (i > 0 && session_ids_[i] < session_ids_[i - 1]) {
      throw Error(ErrorKind::corrupt_input, "session ids decrease at bar " + std::to_string(i));
    }
  }
}

MinuteBarSeries MinuteBarSeries::rescaled(double factor) const {
  std::vector<double> prices(prices_);
  for (auto& p : prices) p *= factor;
  return {timestamps_, std::move(prices), session_ids_};
}

ReturnSeries log_returns(const MinuteBarSeries& bars, GapPolicy gap) {
  if (bars.size() < 2) throw Error(ErrorKind::insufficient_data, "need at least two bars");
  const auto prices = bars.prices();
  const auto sessions = bars.session_ids();
  const auto stamps = bars.timestamps();

  ReturnSeries out;
  out.values.reserve(bars.size() - 1);
  out.session_ids.reserve(bars.size() - 1);
  out.minute_of_day.reserve(bars.size() - 1);
  for (std::size_t i = 1; i < bars.size(); ++i) {
    if (!(prices[i] > 0.0) || !(prices[i - 1] > 0.0)) {
      throw Error(ErrorKind::invalid_price, "bar " + std::to_string(i));
    }
    if (gap == GapPolicy::drop_overnight && sessions[i] != sessions[i - 1]) {
      ++out.omitted_pairs;
      continue;
    }
    out.values.push_back(std::log(prices[i]) - std::log(prices[i - 1]));
    out.session_ids.push_back(sessions[i]);
    out.minute_of_day.push_back(minute_of_day(stamps[i]));
  }
  return out;
}

ReturnSeries returns_from_values(std::vector<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::corrupt_input, "non-finite return at " + std::to_string(i));
    }
  }
  ReturnSeries out;
  out.values = std::move(values);
  return out;
}

double population_std(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

VolatilitySeries normalize_volatility(const ReturnSeries& returns, NormMode mode) {
  if (returns.values.empty()) throw Error(ErrorKind::insufficient_data, "no returns");

  VolatilitySeries out;
  out.session_ids = returns.session_ids;
  out.normalization.mode = mode;

  std::vector<double> signed_values = returns.values;
  if (mode == NormMode::intraday_std) {
    if (returns.minute_of_day.size() != returns.values.size()) {
      throw Error(ErrorKind::bad_config, "intraday_std needs minute-of-day stamps");
    }
    std::vector<double> sum(kMinutesPerDay, 0.0);
    std::vector<std::size_t> count(kMinutesPerDay, 0);
    for (std::size_t i = 0; i < returns.values.size(); ++i) {
      sum[returns.minute_of_day[i]] += std::abs(returns.values[i]);
      ++count[returns.minute_of_day[i]];
    }
    auto& profile = out.normalization.intraday_profile;
    profile.assign(kMinutesPerDay, 0.0);
    for (int m = 0; m < kMinutesPerDay; ++m) {
      if (count[m] > 0) profile[m] = sum[m] / static_cast<double>(count[m]);
    }
    for (std::size_t i = 0; i < signed_values.size(); ++i) {
      const double level = profile[returns.minute_of_day[i]];
      // A minute whose mean |Z| is zero only ever holds zero returns.
      signed_values[i] = level > 0.0 ? signed_values[i] / level : 0.0;
    }
  }

  const double sigma = population_std(signed_values);
  if (!(sigma > 0.0)) throw Error(ErrorKind::degenerate_series, "zero standard deviation");
  out.normalization.sigma = sigma;

  out.values.resize(signed_values.size());
  for (std::size_t i = 0; i < signed_values.size(); ++i) {
    out.values[i] = std::abs(signed_values[i]) / sigma;
  }
  return out;
}

GapPolicy parse_gap_policy(std::string_view text) {
  if (text == "drop_overnight") return GapPolicy::drop_overnight;
  if (text == "keep_overnight") return GapPolicy::keep_overnight;
  throw Error(ErrorKind::bad_config, "unknown gap policy '" + std::string(text) + "'");
}

NormMode parse_norm_mode(std::string_view text) {
  if (text == "std") return NormMode::global_std;
  if (text == "intraday_std") return NormMode::intraday_std;
  throw Error(ErrorKind::bad_config, "unknown normalization '" + std::string(text) + "'");
}

std::string_view to_string(GapPolicy policy) noexcept {
  return policy == GapPolicy::drop_overnight ? "drop_overnight" : "keep_overnight";
}

std::string_view to_string(NormMode mode) noexcept {
  return mode == NormMode::global_std ? "std" : "intraday_std";
}

}  // namespace vri
