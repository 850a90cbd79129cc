// vri: volatility return interval analysis.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vri/distributions.hpp"
#include "vri/error.hpp"
#include "vri/exec.hpp"
#include "vri/intervals.hpp"
#include "vri/io.hpp"
#include "vri/memory.hpp"
#include "vri/persistence.hpp"
#include "vri/pipeline.hpp"
#include "vri/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
  std::vector<std::string> inputs;
  std::string generator;
  std::size_t length = 1'000'000;
  std::string calendar;
  std::vector<double> qs;
  std::vector<double> q_quantiles;
  std::string norm = "std";
  std::string gap = "drop_overnight";
  std::string boundary = "within_series";
  std::string fill = "carry_forward";
  std::string delimiter = ",";
  double bad_row_tolerance = 0.01;
  int bins_per_decade = 10;
  std::string fit_range = "0.01:20";
  int k_bins = 8;
  int shuffles = 20;
  std::optional<std::uint64_t> seed;
  std::size_t t_max = 100;
  std::string persistence_fit_range = "4:100";
  std::string out;
  int workers = 1;
  std::string config;
  std::string name;
};

std::pair<double, double> parse_range(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw vri::Error(vri::ErrorKind::bad_config, std::string(what) + " must be A:B");
  }
  try {
    std::size_t used = 0;
    const double a = std::stod(text.substr(0, colon), &used);
    const double b = std::stod(text.substr(colon + 1));
    return {a, b};
  } catch (const std::exception&) {
    throw vri::Error(vri::ErrorKind::bad_config, std::string(what) + " must be A:B");
  }
}

vri::RunConfig make_config(const Flags& f) {
  vri::RunConfig c;
  for (const auto& p : f.inputs) c.inputs.emplace_back(p);
  if (!f.generator.empty()) c.generator = f.generator;
  c.length = f.length;
  if (!f.calendar.empty()) c.calendar = f.calendar;
  c.norm = vri::parse_norm_mode(f.norm);
  c.gap = vri::parse_gap_policy(f.gap);
  c.boundary = vri::parse_boundary_policy(f.boundary);
  c.fill = vri::parse_fill_policy(f.fill);
  if (f.delimiter.size() != 1) throw vri::Error(vri::ErrorKind::bad_config, "--delimiter must be one character");
  c.delimiter = f.delimiter == "\\t" ? '\t' : f.delimiter[0];
  c.bad_row_tolerance = f.bad_row_tolerance;
  c.qs = f.qs;
  c.q_quantiles = f.q_quantiles;
  c.bins_per_decade = f.bins_per_decade;
  const auto [lo, hi] = parse_range(f.fit_range, "--fit-range");
  c.fit_range = {lo, hi};
  c.k_bins = f.k_bins;
  c.shuffles = f.shuffles;
  c.seed = f.seed;
  c.t_max = f.t_max;
  const auto [plo, phi] = parse_range(f.persistence_fit_range, "--persistence-fit-range");
  c.persistence_fit_lo = plo;
  c.persistence_fit_hi = phi;
  c.out_dir = f.out;
  c.workers = f.workers;
  return c;
}

std::string q_label(double q) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", q);
  return buf;
}

std::string stem_of(const std::string& path) {
  auto s = fs::path(path).stem().string();
  for (const char* suffix : {"_intervals", "_bars", "_pdf"}) {
    const std::string sfx = suffix;
    if (s.size() > sfx.size() && s.compare(s.size() - sfx.size(), sfx.size(), sfx) == 0) {
      s.erase(s.size() - sfx.size());
    }
  }
  return s;
}

void require_one_input(const Flags& f) {
  if (f.inputs.size() != 1) throw vri::Error(vri::ErrorKind::bad_config, "exactly one --input is required");
  if (!fs::exists(f.inputs[0])) throw vri::Error(vri::ErrorKind::unreadable_file, f.inputs[0]);
}

void ensure_out(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw vri::Error(vri::ErrorKind::unreadable_file, "cannot create " + out.string());
}

void wrote(const fs::path& path) { std::cout << path.string() << "\n"; }

void write(const fs::path& path, const std::string& content) {
  vri::io::write_atomic(path, content);
  wrote(path);
}

/// Interval series from an intervals CSV, restricted to --q when given.
std::vector<vri::IntervalSeries> load_intervals(const Flags& f) {
  require_one_input(f);
  auto all = vri::io::read_intervals(f.inputs[0]);
  if (f.qs.empty()) return all;
  std::vector<vri::IntervalSeries> picked;
  for (double q : f.qs) {
    bool found = false;
    for (const auto& s : all) {
      if (s.q == q) {
        picked.push_back(s);
        found = true;
      }
    }
    if (!found) throw vri::Error(vri::ErrorKind::bad_config, "no intervals for q=" + q_label(q) + " in input");
  }
  return picked;
}

int cmd_ingest(const Flags& f) {
  require_one_input(f);
  const auto config = make_config(f);
  const auto in = vri::load_input(f.inputs[0], config);
  ensure_out(config.out_dir);
  if (in.bars) write(config.out_dir / (in.name + "_bars.csv"), vri::io::bars_csv(*in.bars));
  std::cerr << in.rows.dump() << "\n";
  return 0;
}

int cmd_synth(const Flags& f) {
  if (f.generator.empty()) throw vri::Error(vri::ErrorKind::bad_config, "--generator is required");
  if (!f.seed) throw vri::Error(vri::ErrorKind::bad_config, "--seed is required");
  const auto spec = vri::GeneratorSpec::parse(f.generator, f.length, *f.seed);
  const auto values = vri::generate(spec);
  const fs::path out = f.out;
  ensure_out(out);
  const std::string name = f.name.empty() ? std::string(vri::to_string(spec.kind)) : f.name;
  write(out / (name + ".csv"),
        vri::io::series_csv(values, {"generator: " + spec.to_string() + " length=" +
                                         std::to_string(spec.length) + " seed=" + std::to_string(spec.seed)}));
  return 0;
}

int cmd_intervals(const Flags& f) {
  require_one_input(f);
  auto config = make_config(f);
  if (config.qs.empty() && config.q_quantiles.empty()) {
    throw vri::Error(vri::ErrorKind::bad_config, "no thresholds (--q)");
  }
  const auto in = vri::load_input(f.inputs[0], config);
  const auto vol = vri::normalize_volatility(in.returns, config.norm);
  auto qs = config.qs;
  for (double p : config.q_quantiles) qs.push_back(vri::quantile(vol.values, p));
  std::vector<vri::IntervalSeries> all;
  std::string mean_csv = "q,mean_tau,n_intervals\n";
  for (double q : qs) {
    all.push_back(vri::extract_intervals(vol, vri::Threshold(q), config.boundary));
    mean_csv += vri::io::fmt(q) + "," + vri::io::fmt(all.back().mean_tau) + "," +
                std::to_string(all.back().size()) + "\n";
  }
  ensure_out(config.out_dir);
  write(config.out_dir / (in.name + "_intervals.csv"), vri::io::intervals_csv(all));
  write(config.out_dir / (in.name + "_mean_tau.csv"), mean_csv);
  return 0;
}

int cmd_pdf(const Flags& f) {
  const fs::path out = f.out;
  ensure_out(out);
  const auto name = stem_of(f.inputs.at(0));
  for (const auto& taus : load_intervals(f)) {
    if (taus.size() < 2) throw vri::Error(vri::ErrorKind::no_intervals, "fewer than two intervals at q=" + q_label(taus.q));
    const auto scaled = vri::scale_distribution(vri::log_binned_pdf(taus, f.bins_per_decade), taus.mean_tau);
    write(out / (name + "_q" + q_label(taus.q) + "_pdf.csv"), vri::io::distribution_csv(scaled, taus.q));
  }
  return 0;
}

int cmd_fit(const Flags& f) {
  if (f.inputs.empty()) throw vri::Error(vri::ErrorKind::bad_config, "--input is required");
  const auto [lo, hi] = parse_range(f.fit_range, "--fit-range");
  const fs::path out = f.out;
  ensure_out(out);
  for (const auto& path : f.inputs) {
    if (!fs::exists(path)) throw vri::Error(vri::ErrorKind::unreadable_file, path);
    double q = 0.0;
    const auto dist = vri::io::read_distribution(path, &q);
    const auto fit = vri::fit_stretched_exponential(dist, {lo, hi});
    auto j = vri::io::to_json(fit);
    j["q"] = q;
    write(out / (stem_of(path) + "_fit.json"), j.dump(2) + "\n");
  }
  return 0;
}

int cmd_conditional_pdf(const Flags& f) {
  const fs::path out = f.out;
  ensure_out(out);
  const auto name = stem_of(f.inputs.at(0));
  for (const auto& taus : load_intervals(f)) {
    const auto pdf = vri::conditional_pdf(taus, vri::ConditionSplit::halves(taus), f.bins_per_decade);
    for (const auto& w : pdf.warnings) std::cerr << "warning: " << w << "\n";
    write(out / (name + "_q" + q_label(taus.q) + "_conditional_pdf.csv"), vri::io::conditional_pdf_csv(pdf));
  }
  return 0;
}

int cmd_conditional_mean(const Flags& f) {
  if (!f.seed) throw vri::Error(vri::ErrorKind::bad_config, "--seed is required");
  const fs::path out = f.out;
  ensure_out(out);
  const auto name = stem_of(f.inputs.at(0));
  for (const auto& taus : load_intervals(f)) {
    const auto rows = vri::mean_conditional_interval(taus, f.k_bins, f.shuffles, *f.seed);
    write(out / (name + "_q" + q_label(taus.q) + "_conditional_mean.csv"), vri::io::conditional_mean_csv(rows));
  }
  return 0;
}

int cmd_clusters(const Flags& f) {
  const fs::path out = f.out;
  ensure_out(out);
  const auto name = stem_of(f.inputs.at(0));
  for (const auto& taus : load_intervals(f)) {
    write(out / (name + "_q" + q_label(taus.q) + "_clusters.csv"),
          vri::io::clusters_csv(vri::cluster_size_distribution(taus)));
  }
  return 0;
}

int cmd_persistence(const Flags& f) {
  require_one_input(f);
  const auto [plo, phi] = parse_range(f.persistence_fit_range, "--persistence-fit-range");
  const fs::path out = f.out;
  ensure_out(out);
  const auto name = stem_of(f.inputs[0]);

  auto run = [&](const std::vector<double>& series, const std::string& prefix) {
    const auto curve = vri::persistence_curve(series, f.t_max);
    write(out / (prefix + "_persistence.csv"), vri::io::persistence_csv(curve));
    json fits = json::array();
    for (auto sign : {vri::PersistenceSign::plus, vri::PersistenceSign::minus}) {
      fits.push_back(vri::io::to_json(vri::fit_power_law(curve, sign, plo, phi)));
    }
    write(out / (prefix + "_persistence_fit.json"), fits.dump(2) + "\n");
  };

  std::ifstream probe(f.inputs[0]);
  std::string line;
  while (std::getline(probe, line) && (line.empty() || line[0] == '#')) {
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line == "value") {
    run(vri::io::read_series(f.inputs[0]).values, name);
    return 0;
  }
  for (const auto& taus : load_intervals(f)) run(taus.as_doubles(), name + "_q" + q_label(taus.q));
  return 0;
}

int cmd_pipeline(const Flags& f) {
  vri::RunConfig config;
  if (!f.config.empty()) {
    if (!fs::exists(f.config)) throw vri::Error(vri::ErrorKind::unreadable_file, f.config);
    json j;
    try {
      j = json::parse(vri::io::read_text(f.config));
    } catch (const json::exception& e) {
      throw vri::Error(vri::ErrorKind::bad_config, e.what());
    }
    config = vri::RunConfig::from_json(j.contains("config") ? j["config"] : j);
  } else {
    config = make_config(f);
  }
  const auto report = vri::run_pipeline(config);
  std::cout << (config.out_dir / "report.json").string() << "\n";
  if (report.exit_code != 0) {
    const auto& e = report.json["error"];
    std::cerr << "error [" << e["stage"].get<std::string>() << "] " << e["message"].get<std::string>() << "\n";
  }
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volatility return interval analysis"};
  app.require_subcommand(1);

  Flags f;
  if (const char* env = std::getenv(vri::kOutDirEnv)) f.out = env;
  if (f.out.empty()) f.out = ".";

  std::map<std::string, std::function<int(const Flags&)>> handlers{
      {"ingest", cmd_ingest},
      {"synth", cmd_synth},
      {"intervals", cmd_intervals},
      {"pdf", cmd_pdf},
      {"fit", cmd_fit},
      {"conditional-pdf", cmd_conditional_pdf},
      {"conditional-mean", cmd_conditional_mean},
      {"clusters", cmd_clusters},
      {"persistence", cmd_persistence},
      {"pipeline", cmd_pipeline},
  };
  const std::map<std::string, std::string> help{
      {"ingest", "Resample ticks to one-minute bars"},
      {"synth", "Write a synthetic series"},
      {"intervals", "Extract return intervals for each threshold"},
      {"pdf", "Log-binned scaled interval PDF"},
      {"fit", "Stretched-exponential fit to a PDF table"},
      {"conditional-pdf", "Interval PDF conditioned on the preceding interval"},
      {"conditional-mean", "Mean conditional interval with shuffle baseline"},
      {"clusters", "Cluster size distribution of intervals"},
      {"persistence", "Persistence probabilities and exponent fits"},
      {"pipeline", "Run every stage end to end"},
  };

  for (const auto& [cmd, text] : help) {
    auto* sub = app.add_subcommand(cmd, text);
    sub->add_option("--input", f.inputs, "Input file (repeatable)");
    sub->add_option("--generator", f.generator, "Generator spec, e.g. iid_exceedance(0.1)");
    sub->add_option("--length", f.length, "Generated series length");
    sub->add_option("--calendar", f.calendar, "Session calendar file");
    sub->add_option("--q", f.qs, "Volatility threshold (repeatable)");
    sub->add_option("--q-quantile", f.q_quantiles, "Threshold as a quantile of the volatility (repeatable)");
    sub->add_option("--norm", f.norm, "std or intraday_std");
    sub->add_option("--gap", f.gap, "drop_overnight or keep_overnight");
    sub->add_option("--boundary", f.boundary, "within_series or per_session");
    sub->add_option("--fill", f.fill, "carry_forward or drop");
    sub->add_option("--delimiter", f.delimiter, "Tick file delimiter");
    sub->add_option("--bad-row-tolerance", f.bad_row_tolerance, "Allowed fraction of malformed tick rows");
    sub->add_option("--bins-per-decade", f.bins_per_decade, "Log bins per decade");
    sub->add_option("--fit-range", f.fit_range, "Scaled fit range A:B");
    sub->add_option("--k-bins", f.k_bins, "Quantile bins for the conditional mean");
    sub->add_option("--shuffles", f.shuffles, "Shuffle baseline repetitions");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--t-max", f.t_max, "Largest persistence horizon");
    sub->add_option("--persistence-fit-range", f.persistence_fit_range, "Power-law fit range A:B");
    sub->add_option("--out", f.out, std::string("Output directory (default $") + vri::kOutDirEnv + " or .)");
    sub->add_option("--workers", f.workers, "Concurrent analyses");
    sub->add_option("--name", f.name, "Output name for synth");
    sub->add_option("--config", f.config, "Run configuration or report.json to re-run");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    return handlers.at(app.get_subcommands().front()->get_name())(f);
  } catch (const vri::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
