#include "vri/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>

#include "vri/error.hpp"
#include "vri/io.hpp"
#include "vri/memory.hpp"
#include "vri/persistence.hpp"
#include "vri/synth.hpp"

namespace vri {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// An Error tagged with the pipeline stage that raised it.
struct StageError {
  std::string stage;
  ErrorKind kind;
  std::string message;
};

template <typename F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError{stage, e.kind(), e.what()};
  }
}

std::string q_label(double q) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", q);
  return buf;
}

std::string first_header_line(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::unreadable_file, path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    return line;
  }
  return {};
}

ReturnSeries returns_for_role(std::vector<double> values, SeriesRole role) {
  if (role == SeriesRole::log_prices) {
    if (values.size() < 2) throw Error(ErrorKind::insufficient_data, "need two log prices");
    std::vector<double> diffs(values.size() - 1);
    for (std::size_t i = 1; i < values.size(); ++i) diffs[i - 1] = values[i] - values[i - 1];
    return returns_from_values(std::move(diffs));
  }
  return returns_from_values(std::move(values));
}

struct ThresholdResult {
  json summary;
  std::optional<BinnedDistribution> scaled_pdf;
};

}  // namespace

SeriesRole series_role_for_generator(const std::string& spec_text) {
  const auto spec = GeneratorSpec::parse(spec_text, 1, 0);
  switch (spec.kind) {
    case GeneratorKind::iid_gaussian: return SeriesRole::returns;
    case GeneratorKind::random_walk: return SeriesRole::log_prices;
    case GeneratorKind::iid_exceedance:
    case GeneratorKind::long_memory_volatility: return SeriesRole::volatility;
    case GeneratorKind::stretched_exp_intervals: break;
  }
  throw Error(ErrorKind::bad_config, "stretched_exp_intervals produces intervals, not a series");
}

void RunConfig::validate() const {
  if (inputs.empty() == !generator.has_value()) {
    throw Error(ErrorKind::bad_config, "give either --input or --generator");
  }
  for (const auto& p : inputs) {
    if (!std::filesystem::exists(p)) throw Error(ErrorKind::unreadable_file, p.string());
  }
  if (calendar && !std::filesystem::exists(*calendar)) throw Error(ErrorKind::unreadable_file, calendar->string());
  if (qs.empty() && q_quantiles.empty()) throw Error(ErrorKind::bad_config, "no thresholds (--q)");
  for (double q : qs) {
    if (!(q > 0.0) || !std::isfinite(q)) throw Error(ErrorKind::bad_config, "thresholds must be positive");
  }
  for (double p : q_quantiles) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::bad_config, "threshold quantiles must lie in (0,1)");
  }
  if (!seed) throw Error(ErrorKind::bad_config, "--seed is required (shuffle baseline is stochastic)");
  if (generator) {
    GeneratorSpec::parse(*generator, length, *seed);
    series_role_for_generator(*generator);
  }
  if (bins_per_decade < 1) throw Error(ErrorKind::bad_config, "bins per decade must be >= 1");
  if (!(fit_range.lo > 0.0 && fit_range.lo < fit_range.hi)) throw Error(ErrorKind::bad_config, "bad --fit-range");
  if (k_bins < 2) throw Error(ErrorKind::bad_config, "k_bins must be >= 2");
  if (shuffles < 1) throw Error(ErrorKind::bad_config, "--shuffles must be >= 1");
  if (t_max < 1) throw Error(ErrorKind::bad_config, "t_max must be >= 1");
  if (!(persistence_fit_lo < persistence_fit_hi)) throw Error(ErrorKind::bad_config, "bad persistence fit range");
  if (workers < 1) throw Error(ErrorKind::bad_config, "--workers must be >= 1");
}

json RunConfig::to_json() const {
  json j;
  j["inputs"] = json::array();
  for (const auto& p : inputs) j["inputs"].push_back(p.string());
  j["generator"] = generator ? json(*generator) : json(nullptr);
  j["length"] = length;
  j["calendar"] = calendar ? json(calendar->string()) : json(nullptr);
  j["norm"] = std::string(to_string(norm));
  j["gap"] = std::string(to_string(gap));
  j["boundary"] = std::string(to_string(boundary));
  j["fill"] = std::string(to_string(fill));
  j["delimiter"] = std::string(1, delimiter);
  j["bad_row_tolerance"] = bad_row_tolerance;
  j["q"] = qs;
  j["q_quantiles"] = q_quantiles;
  j["bins_per_decade"] = bins_per_decade;
  j["fit_range"] = {fit_range.lo, fit_range.hi};
  j["k_bins"] = k_bins;
  j["shuffles"] = shuffles;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["t_max"] = t_max;
  j["persistence_fit_range"] = {persistence_fit_lo, persistence_fit_hi};
  j["out"] = out_dir.string();
  j["workers"] = workers;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  try {
    for (const auto& p : j.value("inputs", json::array())) c.inputs.emplace_back(p.get<std::string>());
    if (j.contains("generator") && !j["generator"].is_null()) c.generator = j["generator"].get<std::string>();
    c.length = j.value("length", c.length);
    if (j.contains("calendar") && !j["calendar"].is_null()) c.calendar = j["calendar"].get<std::string>();
    c.norm = parse_norm_mode(j.value("norm", std::string("std")));
    c.gap = parse_gap_policy(j.value("gap", std::string("drop_overnight")));
    c.boundary = parse_boundary_policy(j.value("boundary", std::string("within_series")));
    c.fill = parse_fill_policy(j.value("fill", std::string("carry_forward")));
    const auto delim = j.value("delimiter", std::string(","));
    if (delim.size() != 1) throw Error(ErrorKind::bad_config, "delimiter must be one character");
    c.delimiter = delim[0];
    c.bad_row_tolerance = j.value("bad_row_tolerance", c.bad_row_tolerance);
    c.qs = j.value("q", std::vector<double>{});
    c.q_quantiles = j.value("q_quantiles", std::vector<double>{});
    c.bins_per_decade = j.value("bins_per_decade", c.bins_per_decade);
    if (j.contains("fit_range")) {
      c.fit_range = {j["fit_range"].at(0).get<double>(), j["fit_range"].at(1).get<double>()};
    }
    c.k_bins = j.value("k_bins", c.k_bins);
    c.shuffles = j.value("shuffles", c.shuffles);
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    c.t_max = j.value("t_max", c.t_max);
    if (j.contains("persistence_fit_range")) {
      c.persistence_fit_lo = j["persistence_fit_range"].at(0).get<double>();
      c.persistence_fit_hi = j["persistence_fit_range"].at(1).get<double>();
    }
    c.out_dir = j.value("out", std::string("."));
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::bad_config, e.what());
  }
  return c;
}

LoadedInput load_input(const std::filesystem::path& path, const RunConfig& config) {
  LoadedInput in;
  in.name = path.stem().string();
  const auto header = first_header_line(path);

  if (header.find("session_id") != std::string::npos) {
    auto bars = io::read_bars(path);
    in.returns = log_returns(bars, config.gap);
    in.rows = {{"bars", bars.size()}, {"returns", in.returns.values.size()}, {"omitted_pairs", in.returns.omitted_pairs}};
    in.bars = std::move(bars);
    return in;
  }
  if (header == "value") {
    auto series = io::read_series(path);
    SeriesRole role = SeriesRole::returns;
    for (const auto& c : series.comments) {
      if (c.rfind("generator: ", 0) == 0) {
        const auto spec = c.substr(11, c.find(' ', 11) - 11);
        role = series_role_for_generator(spec);
      }
    }
    const auto n = series.values.size();
    in.returns = returns_for_role(std::move(series.values), role);
    in.rows = {{"values", n}, {"returns", in.returns.values.size()}};
    return in;
  }

  TickFormat format;
  format.delimiter = config.delimiter;
  format.bad_row_tolerance = config.bad_row_tolerance;
  const auto ticks = parse_ticks(path, format);
  const auto cal = config.calendar ? SessionCalendar::from_file(*config.calendar) : SessionCalendar{};
  auto resampled = resample_to_minutes(ticks.records, cal, config.fill);
  in.returns = log_returns(resampled.bars, config.gap);
  in.rows = {{"ticks", ticks.records.size()},
             {"bad_rows", ticks.bad_rows},
             {"discarded_ticks", resampled.discarded_ticks},
             {"filled_minutes", resampled.filled_minutes},
             {"bars", resampled.bars.size()},
             {"returns", in.returns.values.size()},
             {"omitted_pairs", in.returns.omitted_pairs}};
  in.bars = std::move(resampled.bars);
  return in;
}

LoadedInput load_generator(const std::string& spec_text, std::size_t length, std::uint64_t seed) {
  const auto spec = GeneratorSpec::parse(spec_text, length, seed);
  LoadedInput in;
  in.name = std::string(to_string(spec.kind));
  in.returns = returns_for_role(generate(spec), series_role_for_generator(spec_text));
  in.rows = {{"values", length}, {"returns", in.returns.values.size()}};
  return in;
}

RunReport run_pipeline(const RunConfig& config) {
  const auto run_start = Clock::now();
  RunReport report;
  report.json["config"] = config.to_json();
  report.json["warnings"] = json::array();
  report.json["stocks"] = json::array();
  json timings = json::object();

  auto fail = [&](const StageError& e) {
    report.exit_code = static_cast<int>(error_class(e.kind));
    report.json["status"] = "error";
    report.json["error"] = {{"stage", e.stage},
                            {"category", std::string(error_name(e.kind))},
                            {"message", e.message},
                            {"exit_code", report.exit_code}};
  };

  try {
    try {
      config.validate();
    } catch (const Error& e) {
      throw StageError{e.kind() == ErrorKind::unreadable_file ? "ingest" : "config", e.kind(), e.what()};
    }
    in_stage("output", [&] {
      std::error_code ec;
      std::filesystem::create_directories(config.out_dir, ec);
      if (ec) throw Error(ErrorKind::unreadable_file, "cannot create " + config.out_dir.string());
    });
    const auto& out = config.out_dir;
    const std::uint64_t seed = *config.seed;

    std::vector<LoadedInput> inputs;
    {
      const auto t0 = Clock::now();
      in_stage("ingest", [&] {
        if (config.generator) {
          inputs.push_back(load_generator(*config.generator, config.length, seed));
        }
        for (const auto& p : config.inputs) inputs.push_back(load_input(p, config));
      });
      for (const auto& in : inputs) {
        if (in.bars) io::write_atomic(out / (in.name + "_bars.csv"), io::bars_csv(*in.bars));
      }
      timings["ingest"] = ms_since(t0);
    }

    std::vector<VolatilitySeries> vols;
    {
      const auto t0 = Clock::now();
      in_stage("normalize", [&] {
        for (const auto& in : inputs) vols.push_back(normalize_volatility(in.returns, config.norm));
      });
      timings["normalize"] = ms_since(t0);
    }

    struct Task {
      std::size_t stock;
      double q;
    };
    std::vector<Task> tasks;
    std::vector<std::vector<double>> stock_qs(inputs.size());
    in_stage("intervals", [&] {
      for (std::size_t s = 0; s < inputs.size(); ++s) {
        stock_qs[s] = config.qs;
        for (double p : config.q_quantiles) stock_qs[s].push_back(quantile(vols[s].values, p));
        for (double q : stock_qs[s]) tasks.push_back({s, q});
      }
    });

    std::vector<ThresholdResult> results(tasks.size());
    std::vector<IntervalSeries> intervals(tasks.size());
    std::vector<std::optional<StageError>> errors(tasks.size());
    const auto t_analysis = Clock::now();

    auto run_task = [&](std::size_t i) {
      const auto& task = tasks[i];
      const auto& name = inputs[task.stock].name;
      const auto prefix = name + "_q" + q_label(task.q);
      json& summary = results[i].summary;
      summary["q"] = task.q;
      summary["files"] = json::array();
      auto emit = [&](const std::string& suffix, const std::string& content) {
        io::write_atomic(out / (prefix + suffix), content);
        summary["files"].push_back(prefix + suffix);
      };

      auto& taus = intervals[i];
      taus = in_stage("intervals", [&] {
        return extract_intervals(vols[task.stock], Threshold(task.q), config.boundary);
      });
      summary["n_exceedances"] = taus.n_exceedances;
      summary["n_intervals"] = taus.size();
      summary["mean_tau"] = taus.empty() ? json(nullptr) : json(taus.mean_tau);
      in_stage("intervals", [&] {
        if (taus.size() < 2) throw Error(ErrorKind::no_intervals, "fewer than two intervals at q=" + q_label(task.q));
      });

      const auto scaled = in_stage("pdf", [&] {
        return scale_distribution(log_binned_pdf(taus, config.bins_per_decade), taus.mean_tau);
      });
      emit("_pdf.csv", io::distribution_csv(scaled, task.q));
      results[i].scaled_pdf = scaled;

      const auto fit = in_stage("fit", [&] { return fit_stretched_exponential(scaled, config.fit_range); });
      summary["fit"] = io::to_json(fit);
      emit("_fit.json", summary["fit"].dump(2) + "\n");

      const auto cpdf = in_stage("conditional-pdf", [&] {
        return conditional_pdf(taus, ConditionSplit::halves(taus), config.bins_per_decade);
      });
      emit("_conditional_pdf.csv", io::conditional_pdf_csv(cpdf));

      const auto cmean = in_stage("conditional-mean", [&] {
        return mean_conditional_interval(taus, config.k_bins, config.shuffles, seed);
      });
      emit("_conditional_mean.csv", io::conditional_mean_csv(cmean));

      const auto clusters = in_stage("clusters", [&] { return cluster_size_distribution(taus); });
      summary["clusters"] = {{"median", clusters.median},
                             {"ties_to_minus", clusters.ties_to_minus},
                             {"max_n_plus", clusters.plus.max_n()},
                             {"max_n_minus", clusters.minus.max_n()}};
      emit("_clusters.csv", io::clusters_csv(clusters));

      in_stage("persistence", [&] {
        const auto series = taus.as_doubles();
        const auto curve = persistence_curve(series, config.t_max);
        emit("_persistence.csv", io::persistence_csv(curve));
        json fits = json::array();
        for (auto sign : {PersistenceSign::plus, PersistenceSign::minus}) {
          fits.push_back(io::to_json(
              fit_power_law(curve, sign, config.persistence_fit_lo, config.persistence_fit_hi)));
        }
        summary["persistence_fit"] = fits;
        emit("_persistence_fit.json", fits.dump(2) + "\n");
      });
    };

    const auto n_tasks = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.workers)
    for (std::ptrdiff_t i = 0; i < n_tasks; ++i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        run_task(k);
      } catch (const StageError& e) {
        errors[k] = e;
      } catch (const Error& e) {
        errors[k] = StageError{"output", e.kind(), e.what()};
      } catch (const std::exception& e) {
        errors[k] = StageError{"analysis", ErrorKind::fit_failed, e.what()};
      }
    }
    timings["analysis"] = ms_since(t_analysis);

    for (std::size_t s = 0; s < inputs.size(); ++s) {
      json stock = {{"name", inputs[s].name},
                    {"rows", inputs[s].rows},
                    {"sigma", vols[s].normalization.sigma},
                    {"thresholds", json::array()}};
      std::string mean_tau_csv = "q,mean_tau,n_intervals\n";
      std::string intervals_out;
      std::vector<IntervalSeries> stock_intervals;
      std::vector<BinnedDistribution> collapse_inputs;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].stock != s) continue;
        stock["thresholds"].push_back(results[i].summary);
        mean_tau_csv += io::fmt(tasks[i].q) + "," + io::fmt(intervals[i].mean_tau) + "," +
                        std::to_string(intervals[i].size()) + "\n";
        stock_intervals.push_back(intervals[i]);
        if (results[i].scaled_pdf) collapse_inputs.push_back(*results[i].scaled_pdf);
      }
      io::write_atomic(out / (inputs[s].name + "_intervals.csv"), io::intervals_csv(stock_intervals));
      io::write_atomic(out / (inputs[s].name + "_mean_tau.csv"), mean_tau_csv);
      report.json["stocks"].push_back(stock);
    }

    for (const auto& e : errors) {
      if (e) throw *e;
    }

    for (std::size_t s = 0; s < inputs.size(); ++s) {
      std::vector<BinnedDistribution> curves;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].stock == s && results[i].scaled_pdf) curves.push_back(*results[i].scaled_pdf);
      }
      if (curves.size() < 2) continue;
      const double quality = in_stage("collapse", [&] { return collapse_quality(curves); });
      report.json["stocks"][s]["collapse_quality"] = quality;
      io::write_atomic(out / (inputs[s].name + "_collapse.json"),
                       json{{"collapse_quality", quality}, {"q", stock_qs[s]}}.dump(2) + "\n");
    }
    report.json["status"] = "ok";
  } catch (const StageError& e) {
    fail(e);
  }

  timings["total"] = ms_since(run_start);
  report.json["timings_ms"] = timings;
  try {
    std::filesystem::create_directories(config.out_dir);
    io::write_atomic(config.out_dir / "report.json", report.json.dump(2) + "\n");
  } catch (const std::exception&) {
    // The report is still returned to the caller.
  }
  return report;
}

}  // namespace vri
