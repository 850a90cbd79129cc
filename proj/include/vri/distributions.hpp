#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vri/exec.hpp"
#include "vri/intervals.hpp"

namespace vri {

/// Log-binned density estimate. For interval data the bins are aligned to
/// integers: bin k covers the integers edges[k] .. edges[k+1]-1, so its width
/// is the number of integer values it can hold. `centers` holds the
/// geometric centre of each bin and is the abscissa used for fitting.
struct BinnedDistribution {
  std::vector<double> edges;
  std::vector<double> centers;
  std::vector<double> densities;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  bool scaled = false;
  double scale = 1.0;  // mean interval applied by scale_distribution

  std::size_t bins() const noexcept { return counts.size(); }
  double width(std::size_t k) const noexcept { return edges[k + 1] - edges[k]; }
  /// Sum of density * width; 1 for any non-empty estimate.
  double probability_mass() const noexcept;
};

/// Integer-aligned log bins: edges are ceil(10^(k/bins_per_decade)) with
/// duplicates removed, starting at 1.
std::vector<double> integer_log_edges(std::int64_t max_value, int bins_per_decade);

BinnedDistribution log_binned_pdf(const IntervalSeries& taus, int bins_per_decade = 10,
                                  Exec exec = Exec::parallel);

/// Log bins at 10^(k/bins_per_decade) for positive real-valued samples.
BinnedDistribution log_binned_density(std::span<const double> samples, int bins_per_decade = 10,
                                      Exec exec = Exec::parallel);

/// x -> x / mean_tau, density -> density * mean_tau.
BinnedDistribution scale_distribution(const BinnedDistribution& dist, double mean_tau);
BinnedDistribution unscale_distribution(const BinnedDistribution& dist);

struct CollapseOptions {
  int bins_per_decade = 10;
  std::uint64_t min_count = 10;
};

/// Largest spread (max - min) of log-density across curves, over the bins
/// of a common log grid where every curve holds at least min_count samples.
double collapse_quality(std::span<const BinnedDistribution> dists, const CollapseOptions& options = {});

struct FitRange {
  double lo = 0.01;
  double hi = 20.0;
};

struct StretchedExpOptions {
  std::uint64_t min_count = 10;
  double gamma_lo = 0.05;
  double gamma_hi = 2.0;
};

/// ln density = ln c - alpha * x^gamma, least squares in log-density.
struct StretchedExpFit {
  double gamma = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  FitRange fit_range;
  double residual = 0.0;  // RMS of log-density residuals
  double sse = 0.0;
  std::size_t n_bins = 0;
};

StretchedExpFit fit_stretched_exponential(const BinnedDistribution& dist, FitRange range = {},
                                          const StretchedExpOptions& options = {});

}  // namespace vri
