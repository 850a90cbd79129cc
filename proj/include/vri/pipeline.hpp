#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vri/distributions.hpp"
#include "vri/ingest.hpp"
#include "vri/intervals.hpp"
#include "vri/series.hpp"

namespace vri {

inline constexpr const char* kOutDirEnv = "VRI_OUT_DIR";

struct RunConfig {
  std::vector<std::filesystem::path> inputs;  // tick CSV, bars CSV or series CSV
  std::optional<std::string> generator;       // generator spec, alternative to inputs
  std::size_t length = 1'000'000;             // generator length
  std::optional<std::filesystem::path> calendar;

  NormMode norm = NormMode::global_std;
  GapPolicy gap = GapPolicy::drop_overnight;
  BoundaryPolicy boundary = BoundaryPolicy::within_series;
  FillPolicy fill = FillPolicy::carry_forward;
  char delimiter = ',';
  double bad_row_tolerance = 0.01;

  std::vector<double> qs;
  std::vector<double> q_quantiles;  // thresholds as quantiles of the normalized volatility

  int bins_per_decade = 10;
  FitRange fit_range;
  int k_bins = 8;
  int shuffles = 20;
  std::optional<std::uint64_t> seed;
  std::size_t t_max = 100;
  double persistence_fit_lo = 4.0;
  double persistence_fit_hi = 100.0;

  std::filesystem::path out_dir = ".";
  int workers = 1;

  /// Throws bad_config / unreadable_file when the configuration cannot run.
  void validate() const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

/// How a series CSV or generator output enters the pipeline.
enum class SeriesRole { returns, log_prices, volatility };

struct RunReport {
  nlohmann::json json;
  int exit_code = 0;
};

/// ingest -> normalize -> per-threshold intervals and every statistic.
/// Writes one artifact per analysis per (stock, q) plus report.json.
RunReport run_pipeline(const RunConfig& config);

/// Loads any supported input as a return series (the "ingest" stage).
struct LoadedInput {
  std::string name;
  ReturnSeries returns;
  std::optional<MinuteBarSeries> bars;
  nlohmann::json rows;  // row counts for the report
};
LoadedInput load_input(const std::filesystem::path& path, const RunConfig& config);
LoadedInput load_generator(const std::string& spec, std::size_t length, std::uint64_t seed);

/// Interpretation of a generated or stored series: which kinds are
/// returns, prices or volatilities.
SeriesRole series_role_for_generator(const std::string& spec_text);

}  // namespace vri
