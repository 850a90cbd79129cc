#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "vri/error.hpp"
#include "vri/intervals.hpp"
#include "vri/rng.hpp"

using namespace vri;

TEST_SUITE("intervals") {
  TEST_CASE("worked example") {
    const std::vector<double> v{3, 0, 0, 2, 0, 5, 1, 2};
    const auto s = extract_intervals(v, Threshold(2.0));
    CHECK(s.taus == std::vector<std::int64_t>{3, 2, 2});
    CHECK(s.n_exceedances == 4);
    CHECK(s.tau_sum == 7);
    CHECK(s.mean_tau == doctest::Approx(7.0 / 3.0));
    CHECK(s.source_length == 8);
    CHECK_FALSE(s.too_few_exceedances);
  }

  TEST_CASE("equality counts as an exceedance") {
    const std::vector<double> v{1, 1, 1};
    CHECK(extract_intervals(v, Threshold(1.0)).taus == std::vector<std::int64_t>{1, 1});
  }

  TEST_CASE("fewer than two exceedances") {
    const std::vector<double> v{0, 5, 0};
    const auto s = extract_intervals(v, Threshold(2.0));
    CHECK(s.empty());
    CHECK(s.too_few_exceedances);
    CHECK(std::isnan(s.mean_tau));
  }

  TEST_CASE("threshold validation") {
    CHECK_THROWS_AS(Threshold(-1.0), Error);
    CHECK_THROWS_AS(Threshold(NAN), Error);
    CHECK_THROWS_AS(extract_intervals(std::vector<double>{}, Threshold(1.0)), Error);
  }

  TEST_CASE("matches brute-force scan on random series") {
    Pcg64 r(2024, 0);
    for (int trial = 0; trial < 300; ++trial) {
      const auto n = 1 + r.bounded(300);
      std::vector<double> v(n);
      for (auto& x : v) x = std::abs(r.normal());
      const double q = 3.0 * r.uniform();
      CHECK(extract_intervals(v, Threshold(q), Exec::serial).taus == oracle::intervals(v, q));
      CHECK(extract_intervals(v, Threshold(q), Exec::parallel).taus == oracle::intervals(v, q));
    }
  }

  TEST_CASE("intervals sum to the span between first and last exceedance") {
    Pcg64 r(1, 0);
    std::vector<double> v(5000);
    for (auto& x : v) x = std::abs(r.normal());
    const auto s = extract_intervals(v, Threshold(1.5));
    std::size_t first = 0;
    std::size_t last = 0;
    bool found = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] >= 1.5) {
        if (!found) first = i;
        found = true;
        last = i;
      }
    }
    CHECK(s.tau_sum == static_cast<std::int64_t>(last - first));
    CHECK(s.size() + 1 == s.n_exceedances);
  }

  TEST_CASE("per-session boundary drops intervals that span sessions") {
    VolatilitySeries vol;
    vol.values = {3, 0, 3, 0, 3, 3};
    vol.session_ids = {0, 0, 0, 1, 1, 1};
    CHECK(extract_intervals(vol, Threshold(1.0), BoundaryPolicy::within_series).taus ==
          std::vector<std::int64_t>{2, 2, 1});
    CHECK(extract_intervals(vol, Threshold(1.0), BoundaryPolicy::per_session).taus ==
          std::vector<std::int64_t>{2, 1});
  }

  TEST_CASE("mean interval curve") {
    VolatilitySeries vol;
    vol.values = {2, 0, 1, 2, 0, 0, 1, 2};
    const std::vector<double> qs{1.0, 2.0, 3.0};
    const auto c = mean_interval_curve(vol, qs);
    REQUIRE(c.size() == 3);
    CHECK(c[0].mean_tau == doctest::Approx(7.0 / 4.0));
    CHECK(c[1].mean_tau == doctest::Approx(3.5));
    CHECK(std::isnan(c[2].mean_tau));
  }

  TEST_CASE("mean interval need not grow with q") {
    // exceedances at {0,1,100} for the lower threshold, {0,1} for the higher one
    std::vector<double> v(101, 0.0);
    v[0] = 5;
    v[1] = 5;
    v[100] = 3;
    CHECK(extract_intervals(v, Threshold(2.0)).mean_tau == 50.0);
    CHECK(extract_intervals(v, Threshold(4.0)).mean_tau == 1.0);
  }

  TEST_CASE("quantile") {
    const std::vector<double> v{4, 1, 3, 2};
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 4.0);
    CHECK(quantile(v, 0.5) == 2.5);
    CHECK_THROWS_AS(quantile(v, 1.5), Error);
  }

  TEST_CASE("from_taus") {
    const auto s = IntervalSeries::from_taus({2, 4}, 1.5);
    CHECK(s.mean_tau == 3.0);
    CHECK(s.q == 1.5);
    CHECK_THROWS_AS(IntervalSeries::from_taus({0}), Error);
  }

  TEST_CASE("hand-checked series") {
    const std::vector<double> v{2, 0, 0, 2, 0, 2};
    const auto s = extract_intervals(v, Threshold(1.0));
    CHECK(s.taus == std::vector<std::int64_t>{3, 2});
    CHECK(s.mean_tau == 2.5);
  }

  TEST_CASE("saturation") {
    const std::vector<double> v(50, 3.0);
    const auto s = extract_intervals(v, Threshold(1.0));
    CHECK(s.size() == 49);
    CHECK(s.mean_tau == 1.0);
    VolatilitySeries vol;
    vol.values = v;
    const std::vector<double> below{0.5};
    CHECK(mean_interval_curve(vol, below)[0].mean_tau == 1.0);
  }

  TEST_CASE("80th percentile threshold against the oracle") {
    Pcg64 r(80, 0);
    std::vector<double> v(1000);
    for (auto& x : v) x = std::abs(r.normal());
    const double q = quantile(v, 0.8);
    CHECK(extract_intervals(v, Threshold(q)).taus == oracle::intervals(v, q));
  }

  TEST_CASE("appending sub-threshold values changes nothing") {
    Pcg64 r(3, 0);
    std::vector<double> v(500);
    for (auto& x : v) x = std::abs(r.normal());
    const auto before = extract_intervals(v, Threshold(1.0)).taus;
    for (int i = 0; i < 100; ++i) v.push_back(0.99 * r.uniform());
    CHECK(extract_intervals(v, Threshold(1.0)).taus == before);
  }

  TEST_CASE("mean interval of an iid exceedance process") {
    Pcg64 r(10, 0);
    for (double p : {0.05, 0.2}) {
      VolatilitySeries vol;
      vol.values.resize(400000);
      for (auto& x : vol.values) x = r.uniform() < p ? 1.0 : 0.0;
      const std::vector<double> qs{0.5};
      const auto single = extract_intervals(vol, Threshold(0.5));
      const auto c = mean_interval_curve(vol, qs);
      CHECK(c[0].mean_tau == single.mean_tau);
      const double se = std::sqrt(1 - p) / p / std::sqrt(static_cast<double>(single.size()));
      CHECK(std::abs(c[0].mean_tau - 1 / p) < 3 * se);
    }
  }
}
