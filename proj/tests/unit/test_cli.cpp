#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "vri/ingest.hpp"
#include "vri/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "vri_cli_tests";

int run(const std::string& args) {
  const std::string cmd = std::string(VRI_CLI_PATH) + " " + args + " >" + (kDir / "stdout.txt").string() +
                          " 2>" + (kDir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out(const std::string& name) { return (kDir / name).string(); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("setup") {
    fs::remove_all(kDir);
    fs::create_directories(kDir);
  }

  TEST_CASE("exit codes") {
    CHECK(run("--help") == 0);
    CHECK(run("") == 1);
    CHECK(run("pdf --bogus-flag 3") == 1);
    CHECK(run("pipeline --generator 'iid_exceedance(0.1)' --q 0.5 --out " + out("noseed")) == 1);
    CHECK(run("pipeline --input /nonexistent.csv --q 1 --seed 1 --out " + out("missing")) == 2);
    const auto report = nlohmann::json::parse(vri::io::read_text(kDir / "missing" / "report.json"));
    CHECK(report["error"]["stage"] == "ingest");
    CHECK(report["error"]["category"] == "unreadable file");
    CHECK(run("synth --generator 'iid_exceedance(2)' --seed 1 --out " + out("x")) == 1);
    CHECK(run("fit --fit-range 1-2 --input /nonexistent.csv") == 1);
  }

  TEST_CASE("stage by stage equals the pipeline") {
    const auto d = kDir / "stages";
    fs::create_directories(d);
    REQUIRE(run("synth --generator 'iid_exceedance(0.1)' --length 100000 --seed 7 --name iid --out " + d.string()) == 0);
    REQUIRE(fs::exists(d / "iid.csv"));
    REQUIRE(run("intervals --input " + (d / "iid.csv").string() + " --q 0.5 --q 2 --out " + d.string()) == 0);
    const auto iv = (d / "iid_intervals.csv").string();
    REQUIRE(run("pdf --input " + iv + " --out " + d.string()) == 0);
    REQUIRE(run("fit --input " + (d / "iid_q0.5_pdf.csv").string() + " --out " + d.string()) == 0);
    REQUIRE(run("conditional-pdf --input " + iv + " --q 0.5 --out " + d.string()) == 0);
    REQUIRE(run("conditional-mean --input " + iv + " --q 0.5 --seed 7 --out " + d.string()) == 0);
    REQUIRE(run("clusters --input " + iv + " --q 0.5 --out " + d.string()) == 0);
    REQUIRE(run("persistence --input " + iv + " --q 0.5 --out " + d.string()) == 0);
    CHECK(run("conditional-mean --input " + iv + " --q 0.25 --seed 7 --out " + d.string()) == 1);

    const auto p = kDir / "whole";
    REQUIRE(run("pipeline --input " + (d / "iid.csv").string() + " --q 0.5 --q 2 --seed 7 --out " + p.string()) == 0);
    for (const char* f : {"iid_intervals.csv", "iid_q0.5_pdf.csv", "iid_q0.5_conditional_pdf.csv",
                          "iid_q0.5_conditional_mean.csv", "iid_q0.5_clusters.csv", "iid_q0.5_persistence.csv",
                          "iid_q0.5_persistence_fit.json", "iid_q2_pdf.csv"}) {
      CHECK_MESSAGE(vri::io::read_text(d / f) == vri::io::read_text(p / f), f);
    }
    const auto staged = nlohmann::json::parse(vri::io::read_text(d / "iid_q0.5_fit.json"));
    const auto whole = nlohmann::json::parse(vri::io::read_text(p / "iid_q0.5_fit.json"));
    CHECK(staged["gamma"] == whole["gamma"]);
    CHECK(staged["alpha"] == whole["alpha"]);
  }

  TEST_CASE("re-run from a report") {
    const auto a = kDir / "first";
    const auto b = kDir / "second";
    REQUIRE(run("pipeline --generator 'iid_exceedance(0.2)' --length 50000 --q 0.5 --seed 3 --out " + a.string()) == 0);
    auto report = nlohmann::json::parse(vri::io::read_text(a / "report.json"));
    report["config"]["out"] = b.string();
    std::ofstream(kDir / "rerun.json") << report.dump();
    REQUIRE(run("pipeline --config " + out("rerun.json")) == 0);
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().filename() == "report.json") continue;
      CHECK(vri::io::read_text(e.path()) == vri::io::read_text(b / e.path().filename()));
    }
  }

  TEST_CASE("output directory from the environment") {
    const auto d = kDir / "from_env";
    const std::string cmd = "VRI_OUT_DIR=" + d.string() + " " + VRI_CLI_PATH +
                            " synth --generator iid_gaussian --length 10 --seed 1 >/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(d / "iid_gaussian.csv"));
  }

  TEST_CASE("tick ingest") {
    const auto ticks = kDir / "stock.csv";
    {
      std::ofstream f(ticks);
      f << "time,price\n";
      for (int i = 0; i < 500; ++i) {
        // 2024-01-02 and 2024-01-03, two ticks a minute from 09:30
        const std::int64_t day = 19724 + i / 250;
        const std::int64_t t = day * 86400 + 9 * 3600 + 30 * 60 + (i % 250) / 2 * 60 + (i % 2 ? 40 : 5);
        f << vri::format_timestamp(t) << "," << 10 + (i * 37 % 11) * 0.01 << "\n";
      }
    }
    const auto d = kDir / "ingest";
    REQUIRE(run("ingest --input " + ticks.string() + " --out " + d.string()) == 0);
    CHECK(fs::exists(d / "stock_bars.csv"));
    // too few intervals for a five-bin fit: a numeric failure
    CHECK(run("pipeline --input " + ticks.string() + " --q 1 --seed 1 --t-max 20 --persistence-fit-range 2:20 --out " +
              d.string()) == 3);
    const auto report = nlohmann::json::parse(vri::io::read_text(d / "report.json"));
    CHECK(report["stocks"][0]["rows"]["ticks"] == 500);
    CHECK(report["stocks"][0]["rows"]["bars"] == 360);
    CHECK(report["stocks"][0]["rows"]["discarded_ticks"] == 20);
    CHECK(report["stocks"][0]["rows"]["filled_minutes"] == 120);
    CHECK(report["error"]["stage"] == "fit");
    CHECK(report["error"]["category"] == "underdetermined fit");
    CHECK(fs::exists(d / "stock_q1_pdf.csv"));
  }
}
