#include "vri/persistence.hpp"

#include <cmath>
#include <string>

#include "vri/error.hpp"
#include "vri/kernels.hpp"

namespace vri {

PersistenceCurve persistence_curve(std::span<const double> series, std::size_t t_max, Exec exec) {
  if (t_max < 1) throw Error(ErrorKind::bad_config, "t_max must be >= 1");
  if (t_max >= series.size()) {
    throw Error(ErrorKind::t_max_too_large,
                std::to_string(t_max) + " >= series length " + std::to_string(series.size()));
  }
  for (double v : series) {
    if (!std::isfinite(v)) throw Error(ErrorKind::corrupt_input, "non-finite value in series");
  }
  const auto hist = kernels::run_histogram(series, t_max, exec);

  PersistenceCurve curve;
  curve.t_values.resize(t_max);
  curve.p_plus.resize(t_max);
  curve.p_minus.resize(t_max);
  curve.n_starts.assign(t_max, hist.starts);
  curve.plus_counts.resize(t_max);
  curve.minus_counts.resize(t_max);
  std::uint64_t plus = hist.above[t_max];
  std::uint64_t minus = hist.below[t_max];
  const auto starts = static_cast<double>(hist.starts);
  for (std::size_t t = t_max; t >= 1; --t) {
    if (t < t_max) {
      plus += hist.above[t];
      minus += hist.below[t];
    }
    curve.t_values[t - 1] = t;
    curve.plus_counts[t - 1] = plus;
    curve.minus_counts[t - 1] = minus;
    curve.p_plus[t - 1] = static_cast<double>(plus) / starts;
    curve.p_minus[t - 1] = static_cast<double>(minus) / starts;
  }
  return curve;
}

PersistenceSign parse_persistence_sign(std::string_view text) {
  if (text == "plus" || text == "+") return PersistenceSign::plus;
  if (text == "minus" || text == "-") return PersistenceSign::minus;
  throw Error(ErrorKind::bad_config, "unknown sign '" + std::string(text) + "'");
}

std::string_view to_string(PersistenceSign sign) noexcept {
  return sign == PersistenceSign::plus ? "plus" : "minus";
}

PowerLawFit fit_power_law(const PersistenceCurve& curve, PersistenceSign sign, double t_min, double t_max) {
  if (!(t_min < t_max)) throw Error(ErrorKind::bad_config, "fit range must satisfy t_min < t_max");
  const auto& p = sign == PersistenceSign::plus ? curve.p_plus : curve.p_minus;
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < curve.t_values.size(); ++i) {
    const auto t = static_cast<double>(curve.t_values[i]);
    if (t < t_min || t > t_max || !(p[i] > 0.0)) continue;
    x.push_back(std::log(t));
    y.push_back(std::log(p[i]));
  }
  if (x.size() < 5) {
    throw Error(ErrorKind::underdetermined_fit, std::to_string(x.size()) + " positive points, need 5");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;

  PowerLawFit fit;
  fit.sign = sign;
  fit.beta = -slope;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.n_points = x.size();
  return fit;
}

}  // namespace vri
