#include "vri/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vri/error.hpp"

namespace vri {
namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::optional<int> parse_hhmm(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  int h = 0;
  int m = 0;
  if (!parse_number(text.substr(0, colon), h) || !parse_number(text.substr(colon + 1), m)) {
    return std::nullopt;
  }
  if (h < 0 || h > 24 || m < 0 || m > 59 || (h == 24 && m != 0)) return std::nullopt;
  return h * 60 + m;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::unreadable_file, path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::unreadable_file, path.string());
  return buffer.str();
}

}  // namespace

SessionCalendar::SessionCalendar() : SessionCalendar({{570, 690}, {780, 900}}, {{555, 570}}) {}

SessionCalendar::SessionCalendar(std::vector<SessionWindow> sessions,
                                 std::vector<SessionWindow> excluded)
    : sessions_(std::move(sessions)), excluded_(std::move(excluded)) {
  if (sessions_.empty()) throw Error(ErrorKind::bad_config, "calendar has no sessions");
  for (std::size_t i = 0; i < sessions_.size(); ++i) {
    const auto& s = sessions_[i];
    if (s.start < 0 || s.end > kMinutesPerDay || s.length() <= 0) {
      throw Error(ErrorKind::bad_config, "session " + std::to_string(i) + " has no duration");
    }
    if (i > 0 && s.start < sessions_[i - 1].end) {
      throw Error(ErrorKind::bad_config, "sessions overlap or are out of order");
    }
  }
  for (const auto& x : excluded_) {
    for (const auto& s : sessions_) {
      if (x.start < s.end && s.start < x.end) {
        throw Error(ErrorKind::bad_config, "excluded window overlaps a session");
      }
    }
  }
}

SessionCalendar SessionCalendar::parse(std::string_view text) {
  std::vector<SessionWindow> sessions;
  std::vector<SessionWindow> excluded;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    bool is_excluded = false;
    if (line.starts_with("exclude")) {
      is_excluded = true;
      line = trim(line.substr(7));
    }
    // Accept '-' or an en dash between the two times.
    std::size_t sep = line.find("\xE2\x80\x93");
    std::size_t sep_len = 3;
    if (sep == std::string_view::npos) {
      sep = line.find('-');
      sep_len = 1;
    }
    const auto from = sep == std::string_view::npos ? std::nullopt : parse_hhmm(line.substr(0, sep));
    const auto to = sep == std::string_view::npos ? std::nullopt : parse_hhmm(line.substr(sep + sep_len));
    if (!from || !to) {
      throw Error(ErrorKind::bad_config, "calendar line " + std::to_string(line_no) + ": expected HH:MM-HH:MM");
    }
    (is_excluded ? excluded : sessions).push_back({*from, *to});
  }
  return SessionCalendar(std::move(sessions), std::move(excluded));
}

SessionCalendar SessionCalendar::from_file(const std::filesystem::path& path) {
  return parse(read_file(path));
}

int SessionCalendar::minutes_per_day() const noexcept {
  int total = 0;
  for (const auto& s : sessions_) total += s.length();
  return total;
}

std::optional<std::size_t> SessionCalendar::session_of(int minute) const noexcept {
  for (std::size_t i = 0; i < sessions_.size(); ++i) {
    if (sessions_[i].contains(minute)) return i;
  }
  return std::nullopt;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;

  if (text.find('-') == std::string_view::npos || text.front() == '-') {
    std::int64_t seconds = 0;
    if (parse_number(text, seconds)) return seconds;
    double fractional = 0.0;
    if (parse_number(text, fractional) && std::isfinite(fractional)) {
      return static_cast<std::int64_t>(std::floor(fractional));
    }
    return std::nullopt;
  }

  // YYYY-MM-DD[ T]HH:MM[:SS[.fff]]
  if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != ' ' && text[10] != 'T') ||
      text[13] != ':') {
    return std::nullopt;
  }
  int y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  int h = 0;
  int mi = 0;
  int s = 0;
  if (!parse_number(text.substr(0, 4), y) || !parse_number(text.substr(5, 2), mo) ||
      !parse_number(text.substr(8, 2), d) || !parse_number(text.substr(11, 2), h) ||
      !parse_number(text.substr(14, 2), mi)) {
    return std::nullopt;
  }
  if (text.size() > 16) {
    if (text[16] != ':' || text.size() < 19 || !parse_number(text.substr(17, 2), s)) return std::nullopt;
    if (text.size() > 19) {
      std::int64_t frac = 0;
      if (text[19] != '.' || !parse_number(text.substr(20), frac) || frac < 0) return std::nullopt;
    }
  }
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return std::nullopt;

  using namespace std::chrono;
  const year_month_day date{year{y}, month{mo}, day{d}};
  if (!date.ok()) return std::nullopt;
  const auto days_since_epoch = sys_days{date}.time_since_epoch().count();
  return days_since_epoch * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

std::string format_timestamp(std::int64_t seconds) {
  using namespace std::chrono;
  const std::int64_t day_index = floor_div(seconds, kSecondsPerDay);
  const std::int64_t sec = seconds - day_index * kSecondsPerDay;
  const year_month_day date{sys_days{days{day_index}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                static_cast<int>(sec / 3600), static_cast<int>((sec / 60) % 60),
                static_cast<int>(sec % 60));
  return buf;
}

std::string format_minute(MinuteStamp minute) { return format_timestamp(minute * 60); }

TickParseResult parse_ticks_text(std::string_view text, const TickFormat& format) {
  if (format.timestamp_column < 0 || format.price_column < 0) {
    throw Error(ErrorKind::bad_config, "timestamp and price columns are required");
  }
  TickParseResult result;
  std::size_t data_rows = 0;
  bool first_content_line = true;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (trim(raw).empty() || trim(raw).front() == '#') continue;

    const bool header_candidate = first_content_line;
    first_content_line = false;
    if (header_candidate && format.header == TickFormat::Header::present) continue;

    const auto fields = split(raw, format.delimiter);
    TickRecord rec;
    bool ok = static_cast<std::size_t>(std::max(format.timestamp_column, format.price_column)) < fields.size();
    if (ok) {
      const auto ts = parse_timestamp(fields[format.timestamp_column]);
      ok = ts.has_value() && parse_number(fields[format.price_column], rec.price) &&
           std::isfinite(rec.price) && rec.price > 0.0;
      if (ok) rec.time = *ts;
    }
    if (ok && format.volume_column >= 0) {
      ok = static_cast<std::size_t>(format.volume_column) < fields.size() &&
           parse_number(fields[format.volume_column], rec.volume) && rec.volume >= 0.0;
    }
    if (!ok && header_candidate && format.header == TickFormat::Header::auto_detect) continue;

    ++data_rows;
    if (ok) {
      result.records.push_back(rec);
    } else {
      ++result.bad_rows;
      if (result.bad_line_numbers.size() < 10) result.bad_line_numbers.push_back(line_no);
    }
  }

  const auto allowed = static_cast<std::size_t>(
      std::ceil(format.bad_row_tolerance * static_cast<double>(data_rows)));
  if (result.bad_rows > allowed) {
    throw Error(ErrorKind::corrupt_input, std::to_string(result.bad_rows) + " of " +
                                              std::to_string(data_rows) + " rows malformed");
  }
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const TickRecord& a, const TickRecord& b) { return a.time < b.time; });
  return result;
}

TickParseResult parse_ticks(const std::filesystem::path& path, const TickFormat& format) {
  return parse_ticks_text(read_file(path), format);
}

FillPolicy parse_fill_policy(std::string_view text) {
  if (text == "carry_forward") return FillPolicy::carry_forward;
  if (text == "drop") return FillPolicy::drop;
  throw Error(ErrorKind::bad_config, "unknown fill policy '" + std::string(text) + "'");
}

std::string_view to_string(FillPolicy policy) noexcept {
  return policy == FillPolicy::carry_forward ? "carry_forward" : "drop";
}

ResampleResult resample_to_minutes(std::span<const TickRecord> ticks, const SessionCalendar& cal,
                                   FillPolicy fill) {
  struct Kept {
    std::int64_t time;
    double price;
    std::int64_t day;
  };
  ResampleResult result;
  std::vector<Kept> kept;
  kept.reserve(ticks.size());
  for (const auto& t : ticks) {
    const std::int64_t day = floor_div(t.time, kSecondsPerDay);
    const int minute = static_cast<int>((t.time - day * kSecondsPerDay) / 60);
    if (cal.session_of(minute)) {
      kept.push_back({t.time, t.price, day});
    } else {
      ++result.discarded_ticks;
    }
  }
  if (kept.empty()) throw Error(ErrorKind::empty_after_calendar_filter, "");
  std::stable_sort(kept.begin(), kept.end(), [](const Kept& a, const Kept& b) { return a.time < b.time; });

  std::vector<std::int64_t> days;
  for (const auto& k : kept) {
    if (days.empty() || days.back() != k.day) days.push_back(k.day);
  }
  const MinuteStamp first = floor_div(kept.front().time, 60);
  const MinuteStamp last = floor_div(kept.back().time, 60);
  const auto sessions = cal.sessions();

  std::vector<MinuteStamp> stamps;
  std::vector<double> prices;
  std::vector<std::int64_t> session_ids;
  std::size_t next = 0;
  std::optional<double> last_price;
  for (std::size_t di = 0; di < days.size(); ++di) {
    for (std::size_t si = 0; si < sessions.size(); ++si) {
      for (int m = sessions[si].start; m < sessions[si].end; ++m) {
        const MinuteStamp label = days[di] * kMinutesPerDay + m;
        if (label < first || label > last) continue;
        bool traded = false;
        while (next < kept.size() && kept[next].time < (label + 1) * 60) {
          traded = traded || kept[next].time >= label * 60;
          last_price = kept[next].price;
          ++next;
        }
        if (!last_price || (!traded && fill == FillPolicy::drop)) continue;
        if (!traded) ++result.filled_minutes;
        stamps.push_back(label);
        prices.push_back(*last_price);
        session_ids.push_back(static_cast<std::int64_t>(di * sessions.size() + si));
      }
    }
  }
  result.bars = MinuteBarSeries(std::move(stamps), std::move(prices), std::move(session_ids));
  return result;
}

std::vector<TickRecord> bars_as_ticks(const MinuteBarSeries& bars) {
  std::vector<TickRecord> ticks;
  ticks.reserve(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    ticks.push_back({bars.timestamps()[i] * 60, bars.prices()[i], 0.0});
  }
  return ticks;
}

}  // namespace vri
