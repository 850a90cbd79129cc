#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP version with bit-identical output.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vri/exec.hpp"

namespace vri::kernels {

// Indices i with values[i] >= threshold, ascending.
std::vector<std::size_t> exceedances_serial(std::span<const double> values, double threshold);
std::vector<std::size_t> exceedances_parallel(std::span<const double> values, double threshold);
std::vector<std::size_t> exceedances(std::span<const double> values, double threshold, Exec exec);

// counts[k] = #{v : edges[k] <= v < edges[k+1]}; values outside are ignored.
std::vector<std::uint64_t> bin_counts_serial(std::span<const double> values,
                                             std::span<const double> edges);
std::vector<std::uint64_t> bin_counts_parallel(std::span<const double> values,
                                               std::span<const double> edges);
std::vector<std::uint64_t> bin_counts(std::span<const double> values,
                                      std::span<const double> edges, Exec exec);

/// Histogram of persistence run lengths over the starts k < n - t_max.
/// above[r] counts starts whose following values stay strictly above the
/// start value for exactly r steps (r capped at t_max); below likewise.
struct RunHistogram {
  std::vector<std::uint64_t> above;
  std::vector<std::uint64_t> below;
  std::size_t starts = 0;
};

// Monotonic-stack next-smaller/next-greater scan, O(n).
RunHistogram run_histogram_stack(std::span<const double> series, std::size_t t_max);
// Per-start forward scan bounded by t_max, parallel over starts.
RunHistogram run_histogram_parallel(std::span<const double> series, std::size_t t_max);
RunHistogram run_histogram(std::span<const double> series, std::size_t t_max, Exec exec);

// out[i] = x with F(x) = u[i] for the density proportional to exp(-alpha x^gamma).
void stretched_exp_quantiles_serial(std::span<const double> u, double gamma, double alpha,
                                    std::span<double> out);
void stretched_exp_quantiles_parallel(std::span<const double> u, double gamma, double alpha,
                                      std::span<double> out);

}  // namespace vri::kernels
