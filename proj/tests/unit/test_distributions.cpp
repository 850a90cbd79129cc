#include <doctest.h>

#include <cmath>
#include <vector>

#include "vri/distributions.hpp"
#include "vri/error.hpp"
#include "vri/rng.hpp"

using namespace vri;

namespace {

/// Interval series whose counts follow the geometric pmf p(1-p)^(k-1) exactly (up to rounding).
IntervalSeries geometric_counts(double p, double n) {
  std::vector<std::int64_t> taus;
  for (int k = 1; k < 400; ++k) {
    const auto c = static_cast<long>(std::llround(n * p * std::pow(1 - p, k - 1)));
    for (long i = 0; i < c; ++i) taus.push_back(k);
  }
  return IntervalSeries::from_taus(std::move(taus));
}

BinnedDistribution exact_curve(double gamma, double alpha, double c) {
  BinnedDistribution d;
  d.scaled = true;
  for (int k = -20; k <= 13; ++k) d.edges.push_back(std::pow(10.0, k / 10.0));
  for (std::size_t k = 0; k + 1 < d.edges.size(); ++k) {
    const double x = std::sqrt(d.edges[k] * d.edges[k + 1]);
    d.centers.push_back(x);
    d.densities.push_back(c * std::exp(-alpha * std::pow(x, gamma)));
    d.counts.push_back(1000);
  }
  d.total = 1000 * d.counts.size();
  return d;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::bad_config;
}

}  // namespace

TEST_SUITE("distributions") {
  TEST_CASE("integer log edges") {
    CHECK(integer_log_edges(100, 10) ==
          std::vector<double>{1, 2, 3, 4, 6, 7, 8, 10, 13, 16, 20, 26, 32, 40, 51, 64, 80, 100, 126});
    CHECK(integer_log_edges(1, 10) == std::vector<double>{1, 2});
    CHECK(integer_log_edges(9, 1) == std::vector<double>{1, 10});
    CHECK_THROWS_AS(integer_log_edges(5, 0), Error);
  }

  TEST_CASE("bins hold integer counts and unit mass") {
    const auto taus = IntervalSeries::from_taus({1, 1, 2, 3, 5, 8, 13, 21});
    const auto d = log_binned_pdf(taus);
    CHECK(d.total == 8);
    CHECK(d.counts[0] == 2);  // [1,2)
    CHECK(d.width(0) == 1.0);
    CHECK(d.probability_mass() == doctest::Approx(1.0));
    CHECK(d.centers[0] == 1.0);
    CHECK(d.centers[4] == doctest::Approx(std::sqrt(6.0 * 6.0)));
  }

  TEST_CASE("geometric pmf oracle") {
    const double p = 0.1;
    const auto taus = geometric_counts(p, 1e6);
    const auto d = log_binned_pdf(taus);
    for (std::size_t k = 0; k < d.bins(); ++k) {
      if (d.edges[k] > 100) break;
      double mass = 0.0;
      for (auto t = static_cast<int>(d.edges[k]); t < static_cast<int>(d.edges[k + 1]); ++t) {
        mass += p * std::pow(1 - p, t - 1);
      }
      CHECK(d.densities[k] == doctest::Approx(mass / d.width(k)).epsilon(1e-3));
    }
  }

  TEST_CASE("log binned density of real samples") {
    Pcg64 r(4, 0);
    std::vector<double> s(200000);
    for (auto& x : s) x = -std::log(r.uniform_open());
    const auto d = log_binned_density(s, 10);
    CHECK(d.probability_mass() == doctest::Approx(1.0));
    for (std::size_t k = 0; k < d.bins(); ++k) {
      if (d.counts[k] < 2000) continue;
      const double expect = (std::exp(-d.edges[k]) - std::exp(-d.edges[k + 1])) / d.width(k);
      CHECK(d.densities[k] == doctest::Approx(expect).epsilon(0.05));
    }
    CHECK(kind_of([] { log_binned_density(std::vector<double>{1.0, -1.0}); }) == ErrorKind::corrupt_input);
  }

  TEST_CASE("scaling round-trip and double scaling") {
    const auto d = log_binned_pdf(IntervalSeries::from_taus({1, 2, 3, 4, 10}));
    const auto s = scale_distribution(d, 4.0);
    CHECK(s.scaled);
    CHECK(s.centers[0] == d.centers[0] / 4.0);
    CHECK(s.densities[0] == d.densities[0] * 4.0);
    CHECK(s.probability_mass() == doctest::Approx(1.0));
    CHECK(kind_of([&] { scale_distribution(s, 4.0); }) == ErrorKind::double_scaling);
    const auto u = unscale_distribution(s);
    for (std::size_t k = 0; k < d.bins(); ++k) CHECK(u.densities[k] == doctest::Approx(d.densities[k]));
    CHECK_THROWS_AS(unscale_distribution(d), Error);
  }

  TEST_CASE("fit recovers an exact stretched exponential") {
    for (double gamma : {0.3, 0.7, 1.0, 1.5}) {
      const auto d = exact_curve(gamma, 2.5, 1.7);
      const auto fit = fit_stretched_exponential(d, {0.01, 20});
      CHECK(fit.gamma == doctest::Approx(gamma).epsilon(1e-6));
      CHECK(fit.alpha == doctest::Approx(2.5).epsilon(1e-6));
      CHECK(fit.c == doctest::Approx(1.7).epsilon(1e-6));
      CHECK(fit.residual < 1e-6);
    }
  }

  TEST_CASE("fit range shrinkage does not increase the error") {
    Pcg64 r(12, 0);
    auto d = exact_curve(0.6, 3.0, 2.0);
    for (auto& v : d.densities) v *= std::exp(0.05 * r.normal());
    double previous = INFINITY;
    for (double hi : {20.0, 10.0, 5.0, 2.0}) {
      const auto fit = fit_stretched_exponential(d, {0.01, hi});
      CHECK(fit.sse <= previous + 1e-12);
      previous = fit.sse;
    }
  }

  TEST_CASE("fit on geometric data is exponential") {
    const auto taus = geometric_counts(0.05, 1e6);
    const auto s = scale_distribution(log_binned_pdf(taus), taus.mean_tau);
    const auto fit = fit_stretched_exponential(s);
    CHECK(fit.gamma == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("fit failures") {
    auto d = exact_curve(1.0, 1.0, 1.0);
    CHECK(kind_of([&] { fit_stretched_exponential(unscale_distribution(d)); }) == ErrorKind::bad_config);
    CHECK(kind_of([&] { fit_stretched_exponential(d, {3.0, 4.0}); }) == ErrorKind::underdetermined_fit);
    CHECK(kind_of([&] { fit_stretched_exponential(d, {2.0, 1.0}); }) == ErrorKind::bad_config);
    for (auto& c : d.counts) c = 3;
    CHECK(kind_of([&] { fit_stretched_exponential(d); }) == ErrorKind::underdetermined_fit);
    auto rising = exact_curve(1.0, 1.0, 1.0);
    for (auto& v : rising.densities) v = 1.0 / v;
    CHECK(kind_of([&] { fit_stretched_exponential(rising); }) == ErrorKind::fit_failed);
  }

  TEST_CASE("collapse quality") {
    const auto a = exact_curve(0.8, 2.0, 1.0);
    const std::vector<BinnedDistribution> same{a, a};
    CHECK(collapse_quality(same) == doctest::Approx(0.0).epsilon(1e-12));
    auto b = a;
    for (auto& v : b.densities) v *= std::exp(0.5);
    const std::vector<BinnedDistribution> shifted{a, b};
    CHECK(collapse_quality(shifted) == doctest::Approx(0.5));

    auto sparse = a;
    for (auto& c : sparse.counts) c = 1;
    const std::vector<BinnedDistribution> none{a, sparse};
    CHECK(kind_of([&] { collapse_quality(none); }) == ErrorKind::no_overlap);
    CHECK(kind_of([&] { collapse_quality(std::vector<BinnedDistribution>{a}); }) == ErrorKind::bad_config);
  }

  TEST_CASE("point mass") {
    const auto taus = IntervalSeries::from_taus(std::vector<std::int64_t>(50, 5));
    const auto d = log_binned_pdf(taus);
    int occupied = 0;
    for (std::size_t k = 0; k < d.bins(); ++k) {
      if (d.counts[k] == 0) continue;
      ++occupied;
      CHECK(d.edges[k] <= 5.0);
      CHECK(d.edges[k + 1] > 5.0);
      CHECK(d.densities[k] * d.width(k) == doctest::Approx(1.0));
    }
    CHECK(occupied == 1);
    const auto s = scale_distribution(d, 5.0);
    for (std::size_t k = 0; k < s.bins(); ++k) {
      if (s.counts[k] == 0) continue;
      CHECK(s.edges[k] <= 1.0);
      CHECK(s.edges[k + 1] > 1.0);
      CHECK(s.densities[k] * s.width(k) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("unit mean scaling is the identity") {
    const auto d = log_binned_pdf(IntervalSeries::from_taus({1, 2, 2, 9}));
    const auto s = scale_distribution(d, 1.0);
    CHECK(s.scaled);
    CHECK(s.edges == d.edges);
    CHECK(s.densities == d.densities);
  }

  TEST_CASE("collapse of a curve offset by e") {
    const auto a = exact_curve(0.5, 2.0, 1.0);
    auto b = a;
    for (auto& v : b.densities) v *= std::exp(1.0);
    const std::vector<BinnedDistribution> pair{a, b};
    CHECK(collapse_quality(pair) == doctest::Approx(1.0));
  }

  TEST_CASE("empty intervals") {
    CHECK(kind_of([] { log_binned_pdf(IntervalSeries{}); }) == ErrorKind::no_intervals);
  }
}
