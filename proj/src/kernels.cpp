#include "vri/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

namespace vri {

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) noexcept {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace vri

namespace vri::kernels {
namespace {

int thread_id() noexcept {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

int team_size() noexcept {
#ifdef _OPENMP
  return omp_get_num_threads();
#else
  return 1;
#endif
}

std::size_t bin_of(std::span<const double> edges, double v) {
  // edges.size() >= 2 checked by callers
  if (!(v >= edges.front()) || !(v < edges.back())) return edges.size();
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

double stretched_exp_quantile(double u, double gamma, double alpha) {
  const double shape = 1.0 / gamma;
  const double g = u <= 0.5 ? boost::math::gamma_p_inv(shape, u)
                            : boost::math::gamma_q_inv(shape, 1.0 - u);
  return std::pow(g / alpha, shape);
}

}  // namespace

std::vector<std::size_t> exceedances_serial(std::span<const double> values, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= threshold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> exceedances_parallel(std::span<const double> values, double threshold) {
  std::vector<std::vector<std::size_t>> parts(static_cast<std::size_t>(max_threads()));
  const std::size_t n = values.size();
#pragma omp parallel
  {
    const auto tid = static_cast<std::size_t>(thread_id());
    const auto nt = static_cast<std::size_t>(team_size());
    const std::size_t begin = n * tid / nt;
    const std::size_t end = n * (tid + 1) / nt;
    auto& local = parts[tid];
    for (std::size_t i = begin; i < end; ++i) {
      if (values[i] >= threshold) local.push_back(i);
    }
  }
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<std::size_t> out;
  out.reserve(total);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<std::size_t> exceedances(std::span<const double> values, double threshold, Exec exec) {
  return exec == Exec::serial ? exceedances_serial(values, threshold)
                              : exceedances_parallel(values, threshold);
}

std::vector<std::uint64_t> bin_counts_serial(std::span<const double> values,
                                             std::span<const double> edges) {
  if (edges.size() < 2) return {};
  std::vector<std::uint64_t> counts(edges.size() - 1, 0);
  for (double v : values) {
    const auto k = bin_of(edges, v);
    if (k < counts.size()) ++counts[k];
  }
  return counts;
}

std::vector<std::uint64_t> bin_counts_parallel(std::span<const double> values,
                                               std::span<const double> edges) {
  if (edges.size() < 2) return {};
  const std::size_t nbins = edges.size() - 1;
  std::vector<std::uint64_t> counts(nbins, 0);
  const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(nbins, 0);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = bin_of(edges, values[static_cast<std::size_t>(i)]);
      if (k < nbins) ++local[k];
    }
#pragma omp critical(vri_bin_counts)
    for (std::size_t k = 0; k < nbins; ++k) counts[k] += local[k];
  }
  return counts;
}

std::vector<std::uint64_t> bin_counts(std::span<const double> values,
                                      std::span<const double> edges, Exec exec) {
  return exec == Exec::serial ? bin_counts_serial(values, edges)
                              : bin_counts_parallel(values, edges);
}

RunHistogram run_histogram_stack(std::span<const double> series, std::size_t t_max) {
  RunHistogram h;
  h.above.assign(t_max + 1, 0);
  h.below.assign(t_max + 1, 0);
  const std::size_t n = series.size();
  if (n <= t_max) return h;
  h.starts = n - t_max;

  // next_le[k]: first j > k with s[j] <= s[k]; next_ge[k]: first j > k with s[j] >= s[k].
  std::vector<std::size_t> next_le(n, n);
  std::vector<std::size_t> next_ge(n, n);
  std::vector<std::size_t> stack;
  stack.reserve(n);
  for (std::size_t k = n; k-- > 0;) {
    while (!stack.empty() && series[stack.back()] > series[k]) stack.pop_back();
    if (!stack.empty()) next_le[k] = stack.back();
    stack.push_back(k);
  }
  stack.clear();
  for (std::size_t k = n; k-- > 0;) {
    while (!stack.empty() && series[stack.back()] < series[k]) stack.pop_back();
    if (!stack.empty()) next_ge[k] = stack.back();
    stack.push_back(k);
  }
  for (std::size_t k = 0; k < h.starts; ++k) {
    ++h.above[std::min(next_le[k] - k - 1, t_max)];
    ++h.below[std::min(next_ge[k] - k - 1, t_max)];
  }
  return h;
}

RunHistogram run_histogram_parallel(std::span<const double> series, std::size_t t_max) {
  RunHistogram h;
  h.above.assign(t_max + 1, 0);
  h.below.assign(t_max + 1, 0);
  const std::size_t n = series.size();
  if (n <= t_max) return h;
  h.starts = n - t_max;
  const auto starts = static_cast<std::ptrdiff_t>(h.starts);
#pragma omp parallel
  {
    std::vector<std::uint64_t> above(t_max + 1, 0);
    std::vector<std::uint64_t> below(t_max + 1, 0);
#pragma omp for schedule(dynamic, 4096) nowait
    for (std::ptrdiff_t sk = 0; sk < starts; ++sk) {
      const auto k = static_cast<std::size_t>(sk);
      const double origin = series[k];
      std::size_t r = 0;
      while (r < t_max && series[k + r + 1] > origin) ++r;
      ++above[r];
      r = 0;
      while (r < t_max && series[k + r + 1] < origin) ++r;
      ++below[r];
    }
#pragma omp critical(vri_run_histogram)
    for (std::size_t r = 0; r <= t_max; ++r) {
      h.above[r] += above[r];
      h.below[r] += below[r];
    }
  }
  return h;
}

RunHistogram run_histogram(std::span<const double> series, std::size_t t_max, Exec exec) {
  return exec == Exec::serial ? run_histogram_stack(series, t_max)
                              : run_histogram_parallel(series, t_max);
}

void stretched_exp_quantiles_serial(std::span<const double> u, double gamma, double alpha,
                                    std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = stretched_exp_quantile(u[i], gamma, alpha);
}

void stretched_exp_quantiles_parallel(std::span<const double> u, double gamma, double alpha,
                                      std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = stretched_exp_quantile(u[k], gamma, alpha);
  }
}

}  // namespace vri::kernels
