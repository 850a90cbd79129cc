#pragma once

// File formats for every stage artifact. Floating-point values are written
// with 17 significant digits so stages can be chained without drift.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vri/distributions.hpp"
#include "vri/intervals.hpp"
#include "vri/memory.hpp"
#include "vri/persistence.hpp"
#include "vri/series.hpp"

namespace vri::io {

std::string fmt(double value);

/// Writes to a sibling temp file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

// timestamp,price,session_id
std::string bars_csv(const MinuteBarSeries& bars);
MinuteBarSeries read_bars(const std::filesystem::path& path);

// '#' header comments, then a single "value" column
std::string series_csv(const std::vector<double>& values, const std::vector<std::string>& comments);
struct SeriesFile {
  std::vector<double> values;
  std::vector<std::string> comments;  // without the leading "# "
};
SeriesFile read_series(const std::filesystem::path& path);

// q,tau
std::string intervals_csv(const std::vector<IntervalSeries>& series);
std::vector<IntervalSeries> read_intervals(const std::filesystem::path& path);

// bin_left,bin_right,count,density,scaled_x,scaled_density
std::string distribution_csv(const BinnedDistribution& scaled, double q);
/// Returns the scaled distribution recorded in a distribution CSV.
BinnedDistribution read_distribution(const std::filesystem::path& path, double* q = nullptr);

// subset,scaled_x,scaled_density,count
std::string conditional_pdf_csv(const ConditionalPdf& pdf);
// bin_center_scaled,mean_scaled,shuffle_mean,shuffle_std,n
std::string conditional_mean_csv(const std::vector<ConditionalMeanRow>& rows);
// sign,n,cumulative,cluster_count
std::string clusters_csv(const ClusterAnalysis& clusters);
// t,p_plus,p_minus,n_starts
std::string persistence_csv(const PersistenceCurve& curve);

nlohmann::json to_json(const StretchedExpFit& fit);
nlohmann::json to_json(const PowerLawFit& fit);

}  // namespace vri::io
