#include "vri/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vri/error.hpp"
#include "vri/kernels.hpp"

namespace vri {
namespace {

void check_bins_per_decade(int bins_per_decade) {
  if (bins_per_decade < 1) throw Error(ErrorKind::bad_config, "bins_per_decade must be >= 1");
}

double log_edge(long k, int bins_per_decade) {
  return std::pow(10.0, static_cast<double>(k) / bins_per_decade);
}

void fill_densities(BinnedDistribution& d) {
  d.total = 0;
  for (auto c : d.counts) d.total += c;
  d.densities.assign(d.counts.size(), 0.0);
  if (d.total == 0) return;
  for (std::size_t k = 0; k < d.counts.size(); ++k) {
    d.densities[k] = static_cast<double>(d.counts[k]) / (static_cast<double>(d.total) * d.width(k));
  }
}

}  // namespace

double BinnedDistribution::probability_mass() const noexcept {
  double mass = 0.0;
  for (std::size_t k = 0; k < densities.size(); ++k) mass += densities[k] * width(k);
  return mass;
}

std::vector<double> integer_log_edges(std::int64_t max_value, int bins_per_decade) {
  check_bins_per_decade(bins_per_decade);
  std::vector<double> edges{1.0};
  for (long k = 1; edges.back() <= static_cast<double>(max_value); ++k) {
    const double raw = log_edge(k, bins_per_decade);
    // 10^(k/b) can land a few ulps above an exact integer.
    const double edge = std::ceil(raw * (1.0 - 1e-12));
    if (edge > edges.back()) edges.push_back(edge);
  }
  return edges;
}

BinnedDistribution log_binned_pdf(const IntervalSeries& taus, int bins_per_decade, Exec exec) {
  check_bins_per_decade(bins_per_decade);
  if (taus.empty()) throw Error(ErrorKind::no_intervals, "");
  const auto max_tau = *std::max_element(taus.taus.begin(), taus.taus.end());

  BinnedDistribution d;
  d.edges = integer_log_edges(max_tau, bins_per_decade);
  const auto values = taus.as_doubles();
  d.counts = kernels::bin_counts(values, d.edges, exec);
  d.centers.resize(d.counts.size());
  for (std::size_t k = 0; k < d.centers.size(); ++k) {
    d.centers[k] = std::sqrt(d.edges[k] * (d.edges[k + 1] - 1.0));
  }
  fill_densities(d);
  return d;
}

BinnedDistribution log_binned_density(std::span<const double> samples, int bins_per_decade, Exec exec) {
  check_bins_per_decade(bins_per_decade);
  if (samples.empty()) throw Error(ErrorKind::no_intervals, "no samples");
  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  if (!(*min_it > 0.0) || !std::isfinite(*max_it)) {
    throw Error(ErrorKind::corrupt_input, "log binning needs finite positive samples");
  }
  auto k_lo = static_cast<long>(std::floor(bins_per_decade * std::log10(*min_it)));
  while (log_edge(k_lo, bins_per_decade) > *min_it) --k_lo;
  auto k_hi = static_cast<long>(std::floor(bins_per_decade * std::log10(*max_it))) + 1;
  while (log_edge(k_hi, bins_per_decade) <= *max_it) ++k_hi;

  BinnedDistribution d;
  for (long k = k_lo; k <= k_hi; ++k) d.edges.push_back(log_edge(k, bins_per_decade));
  d.counts = kernels::bin_counts(samples, d.edges, exec);
  d.centers.resize(d.counts.size());
  for (std::size_t k = 0; k < d.centers.size(); ++k) d.centers[k] = std::sqrt(d.edges[k] * d.edges[k + 1]);
  fill_densities(d);
  return d;
}

BinnedDistribution scale_distribution(const BinnedDistribution& dist, double mean_tau) {
  if (dist.scaled) throw Error(ErrorKind::double_scaling, "");
  if (!(mean_tau > 0.0) || !std::isfinite(mean_tau)) {
    throw Error(ErrorKind::bad_config, "mean interval must be positive");
  }
  BinnedDistribution out = dist;
  for (auto& e : out.edges) e /= mean_tau;
  for (auto& c : out.centers) c /= mean_tau;
  for (auto& d : out.densities) d *= mean_tau;
  out.scaled = true;
  out.scale = mean_tau;
  return out;
}

BinnedDistribution unscale_distribution(const BinnedDistribution& dist) {
  if (!dist.scaled) throw Error(ErrorKind::bad_config, "distribution is not scaled");
  BinnedDistribution out = dist;
  for (auto& e : out.edges) e *= dist.scale;
  for (auto& c : out.centers) c *= dist.scale;
  for (auto& d : out.densities) d /= dist.scale;
  out.scaled = false;
  out.scale = 1.0;
  return out;
}

double collapse_quality(std::span<const BinnedDistribution> dists, const CollapseOptions& options) {
  check_bins_per_decade(options.bins_per_decade);
  if (dists.size() < 2) throw Error(ErrorKind::bad_config, "collapse needs at least two curves");

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& d : dists) {
    if (!d.scaled) throw Error(ErrorKind::bad_config, "collapse needs scaled distributions");
    for (std::size_t k = 0; k < d.bins(); ++k) {
      if (d.counts[k] == 0) continue;
      lo = std::min(lo, d.centers[k]);
      hi = std::max(hi, d.centers[k]);
    }
  }
  if (!(hi > 0.0)) throw Error(ErrorKind::no_overlap, "all curves empty");

  const int b = options.bins_per_decade;
  const auto k0 = static_cast<long>(std::floor(b * std::log10(lo))) - 1;
  const auto k1 = static_cast<long>(std::floor(b * std::log10(hi))) + 2;
  std::vector<double> grid;
  for (long k = k0; k <= k1; ++k) grid.push_back(log_edge(k, b));
  const std::size_t ng = grid.size() - 1;

  // Rebin: each source bin goes to the grid bin holding its centre; the grid
  // density is the width-weighted mean of the source densities.
  std::vector<std::vector<double>> log_density(dists.size(), std::vector<double>(ng, 0.0));
  std::vector<std::vector<std::uint64_t>> counts(dists.size(), std::vector<std::uint64_t>(ng, 0));
  for (std::size_t c = 0; c < dists.size(); ++c) {
    const auto& d = dists[c];
    std::vector<double> mass(ng, 0.0);
    std::vector<double> width(ng, 0.0);
    for (std::size_t k = 0; k < d.bins(); ++k) {
      const auto it = std::upper_bound(grid.begin(), grid.end(), d.centers[k]);
      if (it == grid.begin() || it == grid.end()) continue;
      const auto g = static_cast<std::size_t>(it - grid.begin()) - 1;
      mass[g] += d.densities[k] * d.width(k);
      width[g] += d.width(k);
      counts[c][g] += d.counts[k];
    }
    for (std::size_t g = 0; g < ng; ++g) {
      log_density[c][g] = mass[g] > 0.0 ? std::log(mass[g] / width[g])
                                        : -std::numeric_limits<double>::infinity();
    }
  }

  double worst = -1.0;
  for (std::size_t g = 0; g < ng; ++g) {
    bool usable = true;
    double gmin = std::numeric_limits<double>::infinity();
    double gmax = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < dists.size() && usable; ++c) {
      usable = counts[c][g] >= options.min_count && std::isfinite(log_density[c][g]);
      gmin = std::min(gmin, log_density[c][g]);
      gmax = std::max(gmax, log_density[c][g]);
    }
    if (usable) worst = std::max(worst, gmax - gmin);
  }
  if (worst < 0.0) throw Error(ErrorKind::no_overlap, "no bin is occupied by every curve");
  return worst;
}

namespace {

struct LinearSolve {
  double alpha;
  double log_c;
  double sse;
};

LinearSolve solve_for_gamma(std::span<const double> x, std::span<const double> y, double gamma) {
  const auto n = static_cast<double>(x.size());
  std::vector<double> u(x.size());
  double mu = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    u[i] = std::pow(x[i], gamma);
    mu += u[i];
    my += y[i];
  }
  mu /= n;
  my /= n;
  double suu = 0.0;
  double suy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suy += (u[i] - mu) * (y[i] - my);
  }
  const double slope = suu > 0.0 ? suy / suu : 0.0;
  const double intercept = my - slope * mu;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * u[i]);
    sse += r * r;
  }
  return {-slope, intercept, sse};
}

}  // namespace

StretchedExpFit fit_stretched_exponential(const BinnedDistribution& dist, FitRange range,
                                          const StretchedExpOptions& options) {
  if (!dist.scaled) throw Error(ErrorKind::bad_config, "fit expects a scaled distribution");
  if (!(range.lo < range.hi) || !(range.lo > 0.0)) {
    throw Error(ErrorKind::bad_config, "fit range must satisfy 0 < lo < hi");
  }
  if (!(options.gamma_lo > 0.0 && options.gamma_lo < options.gamma_hi)) {
    throw Error(ErrorKind::bad_config, "bad gamma search interval");
  }

  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t k = 0; k < dist.bins(); ++k) {
    if (dist.centers[k] < range.lo || dist.centers[k] > range.hi) continue;
    if (dist.counts[k] < options.min_count || !(dist.densities[k] > 0.0)) continue;
    x.push_back(dist.centers[k]);
    y.push_back(std::log(dist.densities[k]));
  }
  if (x.size() < 5) {
    throw Error(ErrorKind::underdetermined_fit, std::to_string(x.size()) + " usable bins, need 5");
  }

  // Coarse log-spaced scan to bracket the minimum, then golden-section.
  constexpr int kGrid = 64;
  const double log_lo = std::log(options.gamma_lo);
  const double log_hi = std::log(options.gamma_hi);
  std::vector<double> grid(kGrid + 1);
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / kGrid);
    const double sse = solve_for_gamma(x, y, grid[i]).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best = i;
    }
  }
  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kGrid)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = solve_for_gamma(x, y, c).sse;
  double fd = solve_for_gamma(x, y, d).sse;
  for (int iter = 0; iter < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = solve_for_gamma(x, y, c).sse;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = solve_for_gamma(x, y, d).sse;
    }
  }
  double gamma = 0.5 * (a + b);
  auto sol = solve_for_gamma(x, y, gamma);
  if (best_sse < sol.sse) {
    gamma = grid[best];
    sol = solve_for_gamma(x, y, gamma);
  }
  if (!(sol.alpha > 0.0) || !std::isfinite(sol.log_c)) {
    throw Error(ErrorKind::fit_failed, "fitted density does not decay");
  }

  StretchedExpFit fit;
  fit.gamma = gamma;
  fit.alpha = sol.alpha;
  fit.c = std::exp(sol.log_c);
  fit.fit_range = range;
  fit.sse = sol.sse;
  fit.residual = std::sqrt(sol.sse / static_cast<double>(x.size()));
  fit.n_bins = x.size();
  return fit;
}

}  // namespace vri
