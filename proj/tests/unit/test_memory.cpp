#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "vri/error.hpp"
#include "vri/memory.hpp"
#include "vri/rng.hpp"

using namespace vri;

namespace {

IntervalSeries geometric(std::size_t n, double p, std::uint64_t seed) {
  Pcg64 r(seed, 0);
  std::vector<std::int64_t> t(n);
  for (auto& x : t) {
    x = 1;
    while (r.uniform() >= p) ++x;
  }
  return IntervalSeries::from_taus(std::move(t));
}

}  // namespace

TEST_SUITE("memory") {
  TEST_CASE("rank split sizes differ by at most one") {
    const auto taus = IntervalSeries::from_taus({5, 1, 1, 1, 1, 9, 2});
    const auto h = ConditionSplit::halves(taus);
    CHECK(h.assignment == std::vector<int>{1, 0, 0, 0, 0, 1, 1});
    CHECK(h.label(0) == "lower");
    CHECK(h.label(1) == "upper");
    const auto q = ConditionSplit::quantile_bins(taus, 3);
    std::vector<int> sizes(3, 0);
    for (int g : q.assignment) ++sizes[g];
    CHECK(sizes == std::vector<int>{3, 2, 2});
    CHECK(q.label(2) == "bin3");
  }

  TEST_CASE("conditional pdf uses successors only") {
    const auto taus = IntervalSeries::from_taus({1, 10, 1, 10, 1, 10});
    const auto pdf = conditional_pdf(taus, ConditionSplit::halves(taus));
    REQUIRE(pdf.subsets.size() == 2);
    // after every small interval comes a large one and vice versa
    CHECK(pdf.subsets[0].label == "lower");
    CHECK(pdf.subsets[0].n_successors == 3);
    CHECK(pdf.subsets[0].dist.counts.back() == 3);
    CHECK(pdf.subsets[1].n_successors == 2);
    CHECK(pdf.subsets[1].dist.counts.front() == 2);
    CHECK(pdf.subsets[0].dist.scale == taus.mean_tau);
  }

  TEST_CASE("conditional mean on an alternating sequence") {
    std::vector<std::int64_t> t;
    for (int i = 0; i < 1000; ++i) t.push_back(i % 2 == 0 ? 1 : 3);
    const auto taus = IntervalSeries::from_taus(t);
    const auto rows = mean_conditional_interval(taus, 2, 10, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mean_scaled == doctest::Approx(1.5));
    CHECK(rows[1].mean_scaled == doctest::Approx(0.5));
    CHECK(rows[0].bin_center_scaled == doctest::Approx(0.5));
    CHECK(rows[0].shuffle_mean == doctest::Approx(1.0).epsilon(0.1));
    CHECK(rows[0].n + rows[1].n == 999);
  }

  TEST_CASE("conditional mean is deterministic and thread independent") {
    const auto taus = geometric(20000, 0.1, 3);
    const auto a = mean_conditional_interval(taus, 8, 12, 99, Exec::serial);
    const auto b = mean_conditional_interval(taus, 8, 12, 99, Exec::parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].mean_scaled == b[i].mean_scaled);
      CHECK(a[i].shuffle_mean == b[i].shuffle_mean);
      CHECK(a[i].shuffle_std == b[i].shuffle_std);
    }
    const auto c = mean_conditional_interval(taus, 8, 12, 100);
    CHECK(c[0].shuffle_mean != a[0].shuffle_mean);
  }

  TEST_CASE("conditional mean argument checks") {
    const auto taus = geometric(100, 0.2, 1);
    CHECK_THROWS_AS(mean_conditional_interval(taus, 1, 5, 0), Error);
    CHECK_THROWS_AS(mean_conditional_interval(taus, 8, 0, 0), Error);
    CHECK_THROWS_AS(mean_conditional_interval(IntervalSeries::from_taus({3}), 8, 5, 0), Error);
  }

  TEST_CASE("clusters: worked example with ties") {
    // median 3; the two 3s are labelled '-'
    const auto taus = IntervalSeries::from_taus({5, 6, 3, 1, 7, 3, 2});
    const auto c = cluster_size_distribution(taus);
    CHECK(c.median == 3.0);
    CHECK(c.ties_to_minus == 2);
    CHECK(c.plus.size_counts == std::vector<std::uint64_t>{1, 1});
    CHECK(c.minus.size_counts == std::vector<std::uint64_t>{0, 2});
    CHECK(c.plus.at(1) == 1.0);
    CHECK(c.plus.at(2) == 0.5);
    CHECK(c.minus.at(2) == 1.0);
    CHECK(c.minus.at(3) == 0.0);
  }

  TEST_CASE("clusters: even length median") {
    const auto c = cluster_size_distribution(IntervalSeries::from_taus({1, 2, 3, 4}));
    CHECK(c.median == 2.5);
    CHECK(c.ties_to_minus == 0);
    CHECK(c.plus.n_clusters == 1);
    CHECK(c.minus.n_clusters == 1);
  }

  TEST_CASE("clusters: exhaustive oracle over short sequences") {
    for (int n = 2; n <= 9; ++n) {
      int total = 1;
      for (int i = 0; i < n; ++i) total *= 3;
      for (int code = 0; code < total; ++code) {
        std::vector<std::int64_t> t(n);
        int c = code;
        for (auto& x : t) {
          x = 1 + c % 3;
          c /= 3;
        }
        auto sorted = t;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.front() == sorted.back()) {
          CHECK_THROWS_AS(cluster_size_distribution(IntervalSeries::from_taus(t)), Error);
          continue;
        }
        const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        const auto [plus, minus] = oracle::clusters(t, median);
        const auto got = cluster_size_distribution(IntervalSeries::from_taus(t));
        REQUIRE(got.plus.size_counts == plus);
        REQUIRE(got.minus.size_counts == minus);
      }
    }
  }

  TEST_CASE("clusters: degenerate median") {
    try {
      cluster_size_distribution(IntervalSeries::from_taus({4, 4, 4}));
      FAIL("accepted constant intervals");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::degenerate_median);
    }
  }

  TEST_CASE("two intervals: only the first conditions a successor") {
    const auto taus = IntervalSeries::from_taus({2, 7});
    const auto pdf = conditional_pdf(taus, ConditionSplit::halves(taus));
    REQUIRE(pdf.subsets.size() == 1);
    CHECK(pdf.subsets[0].label == "lower");
    CHECK(pdf.subsets[0].n_successors == 1);
    REQUIRE(pdf.warnings.size() == 1);
    CHECK(pdf.warnings[0].find("upper") != std::string::npos);
  }

  TEST_CASE("iid intervals: lower and upper conditional PDFs agree") {
    const auto taus = geometric(200000, 0.1, 8);
    const auto pdf = conditional_pdf(taus, ConditionSplit::halves(taus));
    const auto& a = pdf.subsets[0].dist;
    const auto& b = pdf.subsets[1].dist;
    for (std::size_t k = 0; k < std::min(a.bins(), b.bins()); ++k) {
      if (a.counts[k] < 30 || b.counts[k] < 30) continue;
      // binomial standard error of each bin fraction
      const double pa = static_cast<double>(a.counts[k]) / a.total;
      const double pb = static_cast<double>(b.counts[k]) / b.total;
      const double se = std::sqrt(pa * (1 - pa) / a.total + pb * (1 - pb) / b.total);
      CHECK(std::abs(pa - pb) < 3.5 * se);
    }
  }

  TEST_CASE("increasing intervals: upper bin successors are larger") {
    std::vector<std::int64_t> t;
    for (int i = 1; i <= 100; ++i) t.push_back(i);
    const auto rows = mean_conditional_interval(IntervalSeries::from_taus(t), 2, 5, 1);
    CHECK(rows[1].mean_scaled > rows[0].mean_scaled);
  }

  TEST_CASE("shuffle baseline is flat") {
    std::vector<std::int64_t> t;
    for (int i = 0; i < 20000; ++i) t.push_back(1 + (i / 50) % 30);  // strongly clustered input
    const auto rows = mean_conditional_interval(IntervalSeries::from_taus(t), 8, 30, 4);
    for (const auto& r : rows) CHECK(std::abs(r.shuffle_mean - 1.0) < 3 * r.shuffle_std + 0.01);
    CHECK(rows.back().mean_scaled > 1.5);
  }

  TEST_CASE("alternating labels give unit clusters") {
    std::vector<std::int64_t> t;
    for (int i = 0; i < 40; ++i) t.push_back(i % 2 ? 9 : 1);
    const auto c = cluster_size_distribution(IntervalSeries::from_taus(t));
    for (const auto* d : {&c.plus, &c.minus}) {
      CHECK(d->at(1) == 1.0);
      CHECK(d->at(2) == 0.0);
      CHECK(d->max_n() == 1);
    }
  }
}
