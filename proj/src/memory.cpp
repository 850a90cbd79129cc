#include "vri/memory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vri/error.hpp"
#include "vri/rng.hpp"

namespace vri {
namespace {

std::vector<int> rank_groups(std::span<const std::int64_t> values, int k) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<int> group(n);
  for (std::size_t rank = 0; rank < n; ++rank) {
    group[order[rank]] = static_cast<int>(rank * static_cast<std::size_t>(k) / n);
  }
  return group;
}

struct BinStats {
  std::vector<double> tau0_sum;
  std::vector<std::size_t> tau0_count;
  std::vector<double> next_sum;
  std::vector<std::size_t> next_count;
};

BinStats conditional_bins(std::span<const std::int64_t> seq, int k) {
  const auto group = rank_groups(seq, k);
  BinStats s;
  s.tau0_sum.assign(k, 0.0);
  s.tau0_count.assign(k, 0);
  s.next_sum.assign(k, 0.0);
  s.next_count.assign(k, 0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    s.tau0_sum[group[i]] += static_cast<double>(seq[i]);
    ++s.tau0_count[group[i]];
    if (i + 1 < seq.size()) {
      s.next_sum[group[i]] += static_cast<double>(seq[i + 1]);
      ++s.next_count[group[i]];
    }
  }
  return s;
}

}  // namespace

ConditionSplit ConditionSplit::halves(const IntervalSeries& taus) {
  ConditionSplit split;
  split.mode = Mode::halves;
  split.groups = 2;
  split.assignment = rank_groups(taus.taus, 2);
  return split;
}

ConditionSplit ConditionSplit::quantile_bins(const IntervalSeries& taus, int k) {
  if (k < 2) throw Error(ErrorKind::bad_config, "quantile split needs k >= 2");
  ConditionSplit split;
  split.mode = Mode::quantile_bins;
  split.groups = k;
  split.assignment = rank_groups(taus.taus, k);
  return split;
}

std::string ConditionSplit::label(int group) const {
  if (mode == Mode::halves) return group == 0 ? "lower" : "upper";
  return "bin" + std::to_string(group + 1);
}

ConditionalPdf conditional_pdf(const IntervalSeries& taus, const ConditionSplit& split,
                               int bins_per_decade) {
  if (taus.size() < 2) throw Error(ErrorKind::insufficient_data, "conditional PDF needs two intervals");
  if (split.assignment.size() != taus.size()) {
    throw Error(ErrorKind::bad_config, "split does not match interval series");
  }
  std::vector<std::vector<std::int64_t>> successors(split.groups);
  for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
    successors[split.assignment[i]].push_back(taus.taus[i + 1]);
  }
  ConditionalPdf out;
  for (int g = 0; g < split.groups; ++g) {
    if (successors[g].empty()) {
      out.warnings.push_back("subset " + split.label(g) + " conditions no successors");
      continue;
    }
    const auto n = successors[g].size();
    const auto series = IntervalSeries::from_taus(std::move(successors[g]), taus.q);
    auto dist = scale_distribution(log_binned_pdf(series, bins_per_decade), taus.mean_tau);
    out.subsets.push_back({split.label(g), std::move(dist), n});
  }
  return out;
}

std::vector<ConditionalMeanRow> mean_conditional_interval(const IntervalSeries& taus, int k_bins,
                                                          int n_shuffles, std::uint64_t seed, Exec exec) {
  if (k_bins < 2) throw Error(ErrorKind::bad_config, "k_bins must be >= 2");
  if (n_shuffles < 1) throw Error(ErrorKind::bad_config, "n_shuffles must be >= 1");
  if (taus.size() < 2) throw Error(ErrorKind::insufficient_data, "conditional mean needs two intervals");

  const double mean = taus.mean_tau;
  const auto k = static_cast<std::size_t>(k_bins);
  const auto stats = conditional_bins(taus.taus, k_bins);

  const auto shuffles = static_cast<std::size_t>(n_shuffles);
  // shuffled[r * k + b]: scaled conditional mean of bin b in shuffle r
  std::vector<double> shuffled(shuffles * k, std::numeric_limits<double>::quiet_NaN());
  auto run_shuffle = [&](std::size_t r) {
    std::vector<std::int64_t> seq = taus.taus;
    Pcg64 rng(seed, r);
    shuffle(std::span<std::int64_t>(seq), rng);
    const auto s = conditional_bins(seq, k_bins);
    for (std::size_t b = 0; b < k; ++b) {
      if (s.next_count[b] > 0) {
        shuffled[r * k + b] = s.next_sum[b] / static_cast<double>(s.next_count[b]) / mean;
      }
    }
  };
  if (exec == Exec::serial) {
    for (std::size_t r = 0; r < shuffles; ++r) run_shuffle(r);
  } else {
    const auto n = static_cast<std::ptrdiff_t>(shuffles);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t r = 0; r < n; ++r) run_shuffle(static_cast<std::size_t>(r));
  }

  std::vector<ConditionalMeanRow> rows(k);
  for (std::size_t b = 0; b < k; ++b) {
    auto& row = rows[b];
    row.bin_center_scaled = stats.tau0_count[b] > 0
                                ? stats.tau0_sum[b] / static_cast<double>(stats.tau0_count[b]) / mean
                                : std::numeric_limits<double>::quiet_NaN();
    row.n = stats.next_count[b];
    row.mean_scaled = row.n > 0 ? stats.next_sum[b] / static_cast<double>(row.n) / mean
                                : std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t r = 0; r < shuffles; ++r) {
      if (std::isnan(shuffled[r * k + b])) continue;
      sum += shuffled[r * k + b];
      ++used;
    }
    row.shuffle_mean = used > 0 ? sum / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
    double ss = 0.0;
    for (std::size_t r = 0; r < shuffles; ++r) {
      if (std::isnan(shuffled[r * k + b])) continue;
      ss += (shuffled[r * k + b] - row.shuffle_mean) * (shuffled[r * k + b] - row.shuffle_mean);
    }
    row.shuffle_std = used > 1 ? std::sqrt(ss / static_cast<double>(used - 1)) : 0.0;
  }
  return rows;
}

double ClusterSizeDistribution::at(std::size_t n) const noexcept {
  if (n == 0) return 1.0;
  return n <= cumulative.size() ? cumulative[n - 1] : 0.0;
}

ClusterAnalysis cluster_size_distribution(const IntervalSeries& taus) {
  if (taus.size() < 2) throw Error(ErrorKind::insufficient_data, "clusters need two intervals");
  std::vector<std::int64_t> sorted = taus.taus;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw Error(ErrorKind::degenerate_median, "all intervals equal");

  ClusterAnalysis out;
  const std::size_t n = sorted.size();
  out.median = n % 2 == 1 ? static_cast<double>(sorted[n / 2])
                          : 0.5 * (static_cast<double>(sorted[n / 2 - 1]) + static_cast<double>(sorted[n / 2]));
  out.plus.sign = ClusterSign::plus;
  out.minus.sign = ClusterSign::minus;

  auto record = [](ClusterSizeDistribution& d, std::size_t size) {
    if (d.size_counts.size() < size) d.size_counts.resize(size, 0);
    ++d.size_counts[size - 1];
    ++d.n_clusters;
  };
  bool run_plus = false;
  std::size_t run = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const auto v = static_cast<double>(taus.taus[i]);
    if (v == out.median) ++out.ties_to_minus;
    const bool is_plus = v > out.median;
    if (run > 0 && is_plus != run_plus) {
      record(run_plus ? out.plus : out.minus, run);
      run = 0;
    }
    run_plus = is_plus;
    ++run;
  }
  record(run_plus ? out.plus : out.minus, run);

  for (auto* d : {&out.plus, &out.minus}) {
    d->cumulative.assign(d->size_counts.size(), 0.0);
    std::uint64_t at_least = 0;
    for (std::size_t m = d->size_counts.size(); m-- > 0;) {
      at_least += d->size_counts[m];
      d->cumulative[m] = static_cast<double>(at_least) / static_cast<double>(d->n_clusters);
    }
  }
  return out;
}

}  // namespace vri
