#include "vri/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "vri/error.hpp"
#include "vri/ingest.hpp"

namespace vri::io {
namespace {

struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name, const std::string& file) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error(ErrorKind::corrupt_input, file + ": missing column '" + name + "'");
  }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

CsvTable read_table(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto text = line.substr(1);
      if (!text.empty() && text.front() == ' ') text.erase(0, 1);
      table.comments.push_back(text);
      continue;
    }
    if (table.header.empty()) {
      table.header = split_csv_line(line);
    } else {
      table.rows.push_back(split_csv_line(line));
      if (table.rows.back().size() != table.header.size()) {
        throw Error(ErrorKind::corrupt_input, path.string() + ": ragged row " + std::to_string(table.rows.size()));
      }
    }
  }
  if (table.header.empty()) throw Error(ErrorKind::corrupt_input, path.string() + ": no header row");
  return table;
}

double to_double(const std::string& text, const std::string& file) {
  if (text == "nan") return std::nan("");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::corrupt_input, file + ": bad number '" + text + "'");
  }
  return v;
}

std::int64_t to_int(const std::string& text, const std::string& file) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::corrupt_input, file + ": bad integer '" + text + "'");
  }
  return v;
}

// "key=value,key=value" comment payload
std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq != std::string::npos) out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

}  // namespace

std::string fmt(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(reinterpret_cast<std::uintptr_t>(&content));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::unreadable_file, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::unreadable_file, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::unreadable_file, "cannot rename onto " + path.string());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::unreadable_file, path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string bars_csv(const MinuteBarSeries& bars) {
  std::string out = "timestamp,price,session_id\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    out += format_minute(bars.timestamps()[i]) + "," + fmt(bars.prices()[i]) + "," +
           std::to_string(bars.session_ids()[i]) + "\n";
  }
  return out;
}

MinuteBarSeries read_bars(const std::filesystem::path& path) {
  const auto table = read_table(path);
  const auto file = path.string();
  const auto ct = table.column("timestamp", file);
  const auto cp = table.column("price", file);
  const auto cs = table.column("session_id", file);
  std::vector<MinuteStamp> stamps;
  std::vector<double> prices;
  std::vector<std::int64_t> sessions;
  for (const auto& row : table.rows) {
    const auto ts = parse_timestamp(row[ct]);
    if (!ts) throw Error(ErrorKind::corrupt_input, file + ": bad timestamp '" + row[ct] + "'");
    stamps.push_back(*ts / 60);
    prices.push_back(to_double(row[cp], file));
    sessions.push_back(to_int(row[cs], file));
  }
  return MinuteBarSeries(std::move(stamps), std::move(prices), std::move(sessions));
}

std::string series_csv(const std::vector<double>& values, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "value\n";
  for (double v : values) out += fmt(v) + "\n";
  return out;
}

SeriesFile read_series(const std::filesystem::path& path) {
  const auto table = read_table(path);
  const auto col = table.column("value", path.string());
  SeriesFile out;
  out.comments = table.comments;
  out.values.reserve(table.rows.size());
  for (const auto& row : table.rows) out.values.push_back(to_double(row[col], path.string()));
  return out;
}

std::string intervals_csv(const std::vector<IntervalSeries>& series) {
  std::string out = "q,tau\n";
  for (const auto& s : series) {
    const auto q = fmt(s.q);
    for (auto t : s.taus) out += q + "," + std::to_string(t) + "\n";
  }
  return out;
}

std::vector<IntervalSeries> read_intervals(const std::filesystem::path& path) {
  const auto table = read_table(path);
  const auto file = path.string();
  const auto cq = table.column("q", file);
  const auto ct = table.column("tau", file);
  std::vector<std::pair<double, std::vector<std::int64_t>>> groups;
  for (const auto& row : table.rows) {
    const double q = to_double(row[cq], file);
    if (groups.empty() || groups.back().first != q) groups.emplace_back(q, std::vector<std::int64_t>{});
    groups.back().second.push_back(to_int(row[ct], file));
  }
  std::vector<IntervalSeries> out;
  for (auto& [q, taus] : groups) out.push_back(IntervalSeries::from_taus(std::move(taus), q));
  return out;
}

std::string distribution_csv(const BinnedDistribution& scaled, double q) {
  if (!scaled.scaled) throw Error(ErrorKind::bad_config, "distribution export expects a scaled distribution");
  const double s = scaled.scale;
  std::string out = "# q=" + fmt(q) + ",mean_tau=" + fmt(s) + ",total=" + std::to_string(scaled.total) + "\n";
  out += "bin_left,bin_right,count,density,scaled_x,scaled_density\n";
  for (std::size_t k = 0; k < scaled.bins(); ++k) {
    out += fmt(scaled.edges[k] * s) + "," + fmt(scaled.edges[k + 1] * s) + "," +
           std::to_string(scaled.counts[k]) + "," + fmt(scaled.densities[k] / s) + "," +
           fmt(scaled.centers[k]) + "," + fmt(scaled.densities[k]) + "\n";
  }
  return out;
}

BinnedDistribution read_distribution(const std::filesystem::path& path, double* q) {
  const auto table = read_table(path);
  const auto file = path.string();
  double mean_tau = 0.0;
  for (const auto& c : table.comments) {
    const auto kv = parse_kv(c);
    if (auto it = kv.find("mean_tau"); it != kv.end()) mean_tau = to_double(it->second, file);
    if (auto it = kv.find("q"); it != kv.end() && q) *q = to_double(it->second, file);
  }
  if (!(mean_tau > 0.0)) throw Error(ErrorKind::corrupt_input, file + ": missing mean_tau comment");
  const auto cl = table.column("bin_left", file);
  const auto cr = table.column("bin_right", file);
  const auto cc = table.column("count", file);
  const auto cx = table.column("scaled_x", file);
  const auto cd = table.column("scaled_density", file);
  BinnedDistribution d;
  d.scaled = true;
  d.scale = mean_tau;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (i == 0) d.edges.push_back(to_double(row[cl], file) / mean_tau);
    d.edges.push_back(to_double(row[cr], file) / mean_tau);
    d.counts.push_back(static_cast<std::uint64_t>(to_int(row[cc], file)));
    d.centers.push_back(to_double(row[cx], file));
    d.densities.push_back(to_double(row[cd], file));
    d.total += d.counts.back();
  }
  return d;
}

std::string conditional_pdf_csv(const ConditionalPdf& pdf) {
  std::string out = "subset,scaled_x,scaled_density,count\n";
  for (const auto& s : pdf.subsets) {
    for (std::size_t k = 0; k < s.dist.bins(); ++k) {
      out += s.label + "," + fmt(s.dist.centers[k]) + "," + fmt(s.dist.densities[k]) + "," +
             std::to_string(s.dist.counts[k]) + "\n";
    }
  }
  return out;
}

std::string conditional_mean_csv(const std::vector<ConditionalMeanRow>& rows) {
  std::string out = "bin_center_scaled,mean_scaled,shuffle_mean,shuffle_std,n\n";
  for (const auto& r : rows) {
    out += fmt(r.bin_center_scaled) + "," + fmt(r.mean_scaled) + "," + fmt(r.shuffle_mean) + "," +
           fmt(r.shuffle_std) + "," + std::to_string(r.n) + "\n";
  }
  return out;
}

std::string clusters_csv(const ClusterAnalysis& clusters) {
  std::string out = "# median=" + fmt(clusters.median) + ",ties_to_minus=" +
                    std::to_string(clusters.ties_to_minus) + "\n";
  out += "sign,n,cumulative,cluster_count\n";
  for (const auto* d : {&clusters.plus, &clusters.minus}) {
    const char* sign = d->sign == ClusterSign::plus ? "plus" : "minus";
    for (std::size_t n = 1; n <= d->max_n(); ++n) {
      out += std::string(sign) + "," + std::to_string(n) + "," + fmt(d->cumulative[n - 1]) + "," +
             std::to_string(d->size_counts[n - 1]) + "\n";
    }
  }
  return out;
}

std::string persistence_csv(const PersistenceCurve& curve) {
  std::string out = "t,p_plus,p_minus,n_starts\n";
  for (std::size_t i = 0; i < curve.t_values.size(); ++i) {
    out += std::to_string(curve.t_values[i]) + "," + fmt(curve.p_plus[i]) + "," + fmt(curve.p_minus[i]) +
           "," + std::to_string(curve.n_starts[i]) + "\n";
  }
  return out;
}

nlohmann::json to_json(const StretchedExpFit& fit) {
  return {{"gamma", fit.gamma},
          {"alpha", fit.alpha},
          {"c", fit.c},
          {"residual", fit.residual},
          {"sse", fit.sse},
          {"fit_range", {fit.fit_range.lo, fit.fit_range.hi}},
          {"n_bins", fit.n_bins}};
}

nlohmann::json to_json(const PowerLawFit& fit) {
  return {{"sign", std::string(to_string(fit.sign))},
          {"beta", fit.beta},
          {"r_squared", fit.r_squared},
          {"n_points", fit.n_points},
          {"fit_range", {fit.t_min, fit.t_max}}};
}

}  // namespace vri::io
