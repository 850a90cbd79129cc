#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vri/distributions.hpp"
#include "vri/exec.hpp"
#include "vri/intervals.hpp"

namespace vri {

/// Partition of the intervals by the sorted order of their values. Ties are
/// ordered by position, so group sizes differ by at most one.
struct ConditionSplit {
  enum class Mode { halves, quantile_bins };

  Mode mode = Mode::halves;
  int groups = 2;
  std::vector<int> assignment;  // group of each interval, 0 = smallest values

  static ConditionSplit halves(const IntervalSeries& taus);
  static ConditionSplit quantile_bins(const IntervalSeries& taus, int k);

  std::string label(int group) const;
};

struct ConditionalSubset {
  std::string label;
  BinnedDistribution dist;  // scaled by the global mean interval
  std::size_t n_successors = 0;
};

struct ConditionalPdf {
  std::vector<ConditionalSubset> subsets;
  std::vector<std::string> warnings;
};

/// PDF of the interval that immediately follows each tau0 in a subset.
ConditionalPdf conditional_pdf(const IntervalSeries& taus, const ConditionSplit& split,
                               int bins_per_decade = 10);

struct ConditionalMeanRow {
  double bin_center_scaled = 0.0;  // mean tau0 in the bin / mean tau
  double mean_scaled = 0.0;        // <tau|tau0> / mean tau; NaN when the bin has no successors
  double shuffle_mean = 0.0;
  double shuffle_std = 0.0;  // sample std across shuffles
  std::size_t n = 0;         // successors in the bin
};

/// <tau|tau0>/tau_bar over k quantile bins of tau0, with a baseline from
/// n_shuffles random permutations. Shuffle r uses stream r of `seed`.
std::vector<ConditionalMeanRow> mean_conditional_interval(const IntervalSeries& taus, int k_bins = 8,
                                                          int n_shuffles = 20, std::uint64_t seed = 0,
                                                          Exec exec = Exec::parallel);

enum class ClusterSign { plus, minus };

struct ClusterSizeDistribution {
  ClusterSign sign = ClusterSign::plus;
  std::vector<std::uint64_t> size_counts;  // size_counts[n-1]: clusters of size exactly n
  std::vector<double> cumulative;          // cumulative[n-1]: P(size >= n)
  std::uint64_t n_clusters = 0;

  std::size_t max_n() const noexcept { return size_counts.size(); }
  /// P(size >= n); 0 beyond max_n.
  double at(std::size_t n) const noexcept;
};

struct ClusterAnalysis {
  ClusterSizeDistribution plus;
  ClusterSizeDistribution minus;
  double median = 0.0;
  std::size_t ties_to_minus = 0;  // intervals equal to the median, labelled '-'
};

/// Labels each interval '+' (> median) or '-' (<= median); maximal runs of
/// one label are clusters.
ClusterAnalysis cluster_size_distribution(const IntervalSeries& taus);

}  // namespace vri
