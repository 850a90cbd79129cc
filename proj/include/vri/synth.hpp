#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vri/exec.hpp"

namespace vri {

enum class GeneratorKind {
  iid_gaussian,             // standard normal
  iid_exceedance,           // 1 with probability p, else 0
  random_walk,              // cumulative sum of iid +-1 steps
  stretched_exp_intervals,  // density proportional to exp(-alpha x^gamma), x > 0
  long_memory_volatility,   // |fractional Gaussian noise| with Hurst parameter H
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::iid_gaussian;
  double p = 0.1;
  double gamma = 1.0;
  double alpha = 1.0;
  double hurst = 0.8;
  std::size_t length = 1;
  std::uint64_t seed = 0;

  /// Throws bad_generator_spec when parameters are out of range.
  void validate() const;

  /// "kind" or "kind(a,b)" or "kind(name=a,...)", e.g. "iid_exceedance(0.1)",
  /// "stretched_exp_intervals(gamma=0.7,alpha=3)", "long_memory_volatility(H=0.8)".
  static GeneratorSpec parse(std::string_view text, std::size_t length, std::uint64_t seed);

  /// Canonical "kind(name=value,...)" form; parse(to_string()) round-trips.
  std::string to_string() const;
};

std::string_view to_string(GeneratorKind kind) noexcept;

/// Deterministic in (kind, parameters, length, seed); all draws come from
/// Pcg64(seed, 0).
std::vector<double> generate(const GeneratorSpec& spec, Exec exec = Exec::parallel);

/// Autocovariance of unit-variance fractional Gaussian noise at lag k.
double fgn_autocovariance(double hurst, std::size_t lag);

/// CDF of the stretched-exponential density: P(1/gamma, alpha x^gamma).
double stretched_exp_cdf(double x, double gamma, double alpha);

}  // namespace vri
