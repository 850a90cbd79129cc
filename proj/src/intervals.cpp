#include "vri/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vri/error.hpp"
#include "vri/kernels.hpp"

namespace vri {

Threshold::Threshold(double q) : q_(q) {
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw Error(ErrorKind::bad_config, "threshold must be finite and >= 0");
  }
}

BoundaryPolicy parse_boundary_policy(std::string_view text) {
  if (text == "within_series") return BoundaryPolicy::within_series;
  if (text == "per_session") return BoundaryPolicy::per_session;
  throw Error(ErrorKind::bad_config, "unknown boundary policy '" + std::string(text) + "'");
}

std::string_view to_string(BoundaryPolicy policy) noexcept {
  return policy == BoundaryPolicy::within_series ? "within_series" : "per_session";
}

IntervalSeries IntervalSeries::from_taus(std::vector<std::int64_t> taus, double q) {
  IntervalSeries out;
  out.q = q;
  for (auto t : taus) {
    if (t < 1) throw Error(ErrorKind::corrupt_input, "interval < 1");
    out.tau_sum += t;
  }
  out.taus = std::move(taus);
  out.n_exceedances = out.taus.empty() ? 0 : out.taus.size() + 1;
  out.source_length = static_cast<std::size_t>(out.tau_sum) + 1;
  out.too_few_exceedances = out.taus.empty();
  out.mean_tau = out.taus.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : static_cast<double>(out.tau_sum) / static_cast<double>(out.taus.size());
  return out;
}

std::vector<double> IntervalSeries::as_doubles() const {
  return {taus.begin(), taus.end()};
}

namespace {

IntervalSeries intervals_from_indices(std::span<const std::size_t> idx,
                                      std::span<const std::int64_t> sessions, double q,
                                      std::size_t length) {
  IntervalSeries out;
  out.q = q;
  out.source_length = length;
  out.n_exceedances = idx.size();
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (!sessions.empty() && sessions[idx[k]] != sessions[idx[k - 1]]) continue;
    const auto tau = static_cast<std::int64_t>(idx[k] - idx[k - 1]);
    out.taus.push_back(tau);
    out.tau_sum += tau;
  }
  out.too_few_exceedances = out.taus.empty();
  out.mean_tau = out.taus.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : static_cast<double>(out.tau_sum) / static_cast<double>(out.taus.size());
  return out;
}

}  // namespace

IntervalSeries extract_intervals(const VolatilitySeries& vol, Threshold q, BoundaryPolicy boundary,
                                 Exec exec) {
  if (vol.values.empty()) throw Error(ErrorKind::insufficient_data, "empty volatility series");
  const auto idx = kernels::exceedances(vol.values, q.value(), exec);
  std::span<const std::int64_t> sessions;
  if (boundary == BoundaryPolicy::per_session) {
    if (!vol.session_ids.empty() && vol.session_ids.size() != vol.values.size()) {
      throw Error(ErrorKind::corrupt_input, "session ids do not match volatility length");
    }
    sessions = vol.session_ids;
  }
  return intervals_from_indices(idx, sessions, q.value(), vol.values.size());
}

IntervalSeries extract_intervals(std::span<const double> values, Threshold q, Exec exec) {
  if (values.empty()) throw Error(ErrorKind::insufficient_data, "empty volatility series");
  const auto idx = kernels::exceedances(values, q.value(), exec);
  return intervals_from_indices(idx, {}, q.value(), values.size());
}

std::vector<MeanIntervalPoint> mean_interval_curve(const VolatilitySeries& vol,
                                                   std::span<const double> qs,
                                                   BoundaryPolicy boundary) {
  if (qs.empty()) throw Error(ErrorKind::bad_config, "no thresholds");
  std::vector<MeanIntervalPoint> out(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto series = extract_intervals(vol, Threshold(qs[i]), boundary);
    out[i] = {qs[i], series.mean_tau, series.size()};
  }
  return out;
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::insufficient_data, "quantile of empty series");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::bad_config, "quantile level outside [0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace vri
