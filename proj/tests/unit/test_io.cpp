#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "vri/error.hpp"
#include "vri/io.hpp"
#include "vri/rng.hpp"

using namespace vri;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "vri_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("17 significant digits round-trip") {
    Pcg64 r(3, 0);
    for (int i = 0; i < 1000; ++i) {
      const double x = r.normal() * std::pow(10.0, static_cast<int>(r.bounded(20)) - 10);
      CHECK(std::stod(io::fmt(x)) == x);
    }
    CHECK(io::fmt(NAN) == "nan");
  }

  TEST_CASE("atomic write leaves no temp files") {
    const auto p = scratch("atomic.txt");
    io::write_atomic(p, "first\n");
    io::write_atomic(p, "second\n");
    CHECK(io::read_text(p) == "second\n");
    for (const auto& e : fs::directory_iterator(p.parent_path())) {
      CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
    }
    CHECK_THROWS_AS(io::write_atomic("/nonexistent/dir/x.txt", "x"), Error);
  }

  TEST_CASE("bars round-trip") {
    const MinuteBarSeries bars({28397250, 28397251, 28397400}, {10.25, 10.5, 1.0 / 3.0}, {0, 0, 1});
    const auto p = scratch("bars.csv");
    io::write_atomic(p, io::bars_csv(bars));
    const auto back = io::read_bars(p);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(back.timestamps()[i] == bars.timestamps()[i]);
      CHECK(back.prices()[i] == bars.prices()[i]);
      CHECK(back.session_ids()[i] == bars.session_ids()[i]);
    }
  }

  TEST_CASE("series round-trip keeps comments") {
    const auto p = scratch("series.csv");
    io::write_atomic(p, io::series_csv({0.1, 2.0 / 3.0, -5e-300}, {"generator: iid_gaussian seed=1"}));
    const auto s = io::read_series(p);
    CHECK(s.values == std::vector<double>{0.1, 2.0 / 3.0, -5e-300});
    CHECK(s.comments == std::vector<std::string>{"generator: iid_gaussian seed=1"});
  }

  TEST_CASE("intervals round-trip grouped by q") {
    const auto a = IntervalSeries::from_taus({1, 5, 2}, 1.5);
    const auto b = IntervalSeries::from_taus({7, 3}, 2.0 / 3.0);
    const auto p = scratch("intervals.csv");
    io::write_atomic(p, io::intervals_csv({a, b}));
    const auto back = io::read_intervals(p);
    REQUIRE(back.size() == 2);
    CHECK(back[0].taus == a.taus);
    CHECK(back[1].q == b.q);
    CHECK(back[1].mean_tau == b.mean_tau);
  }

  TEST_CASE("distribution round-trip is exact for fitting") {
    const auto taus = IntervalSeries::from_taus({1, 1, 2, 3, 3, 4, 7, 9, 12, 30}, 2.5);
    const auto d = scale_distribution(log_binned_pdf(taus), taus.mean_tau);
    const auto p = scratch("pdf.csv");
    io::write_atomic(p, io::distribution_csv(d, 2.5));
    double q = 0;
    const auto back = io::read_distribution(p, &q);
    CHECK(q == 2.5);
    CHECK(back.scale == d.scale);
    CHECK(back.centers == d.centers);
    CHECK(back.densities == d.densities);
    CHECK(back.counts == d.counts);
    CHECK(back.total == d.total);
    CHECK_THROWS_AS(io::distribution_csv(unscale_distribution(d), 1), Error);
  }

  TEST_CASE("malformed files") {
    const auto p = scratch("broken.csv");
    io::write_atomic(p, "q,tau\n1.0,abc\n");
    try {
      io::read_intervals(p);
      FAIL("accepted a bad tau");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::corrupt_input);
    }
    io::write_atomic(p, "timestamp,price\n");
    CHECK_THROWS_AS(io::read_bars(p), Error);
    CHECK_THROWS_AS(io::read_series(scratch("does_not_exist.csv")), Error);
  }

  TEST_CASE("fit json") {
    StretchedExpFit f;
    f.gamma = 0.5;
    f.alpha = 2;
    const auto j = io::to_json(f);
    CHECK(j["gamma"] == 0.5);
    CHECK(j["fit_range"][1] == 20.0);
  }
}
