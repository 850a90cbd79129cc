#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "vri/exec.hpp"

namespace vri {

/// P+(t): fraction of starts t' whose next t values all lie strictly above
/// series[t']; P-(t) likewise strictly below. Every t uses the same start
/// population, t' + t_max <= n - 1, so both curves are non-increasing.
struct PersistenceCurve {
  std::vector<std::size_t> t_values;  // 1..t_max
  std::vector<double> p_plus;
  std::vector<double> p_minus;
  std::vector<std::size_t> n_starts;
  std::vector<std::uint64_t> plus_counts;
  std::vector<std::uint64_t> minus_counts;
};

PersistenceCurve persistence_curve(std::span<const double> series, std::size_t t_max,
                                   Exec exec = Exec::parallel);

enum class PersistenceSign { plus, minus };

PersistenceSign parse_persistence_sign(std::string_view text);
std::string_view to_string(PersistenceSign sign) noexcept;

struct PowerLawFit {
  PersistenceSign sign = PersistenceSign::minus;
  double beta = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

/// OLS of ln P against ln t over t in [t_min, t_max] with P > 0; beta = -slope.
PowerLawFit fit_power_law(const PersistenceCurve& curve, PersistenceSign sign, double t_min = 4.0,
                          double t_max = 100.0);

}  // namespace vri
