#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vri/series.hpp"

namespace vri {

/// Half-open window [start, end) in minutes after midnight.
struct SessionWindow {
  int start = 0;
  int end = 0;

  bool contains(int minute) const noexcept { return minute >= start && minute < end; }
  int length() const noexcept { return end - start; }
};

/// Daily continuous-auction windows. Ticks outside every session (the
/// 09:15-09:30 call auction and cool period, the lunch break) are discarded.
class SessionCalendar {
 public:
  /// SHSE/SZSE continuous double auction: 09:30-11:30 and 13:00-15:00.
  SessionCalendar();
  explicit SessionCalendar(std::vector<SessionWindow> sessions,
                           std::vector<SessionWindow> excluded = {});

  /// Reads one "HH:MM-HH:MM" window per line. Lines starting with
  /// "exclude" declare excluded windows; '#' starts a comment.
  static SessionCalendar from_file(const std::filesystem::path& path);
  static SessionCalendar parse(std::string_view text);

  std::span<const SessionWindow> sessions() const noexcept { return sessions_; }
  std::span<const SessionWindow> excluded() const noexcept { return excluded_; }
  int minutes_per_day() const noexcept;

  /// Index of the session containing `minute`, if any.
  std::optional<std::size_t> session_of(int minute) const noexcept;

 private:
  std::vector<SessionWindow> sessions_;
  std::vector<SessionWindow> excluded_;
};

struct TickRecord {
  std::int64_t time = 0;  // seconds since 1970-01-01 00:00, exchange-local
  double price = 0.0;
  double volume = 0.0;
};

struct TickFormat {
  enum class Header { auto_detect, present, absent };

  char delimiter = ',';
  Header header = Header::auto_detect;
  int timestamp_column = 0;
  int price_column = 1;
  int volume_column = -1;  // negative: no volume column
  double bad_row_tolerance = 0.01;
};

struct TickParseResult {
  std::vector<TickRecord> records;
  std::size_t bad_rows = 0;
  std::vector<std::size_t> bad_line_numbers;  // first few, 1-based
};

/// Accepts "YYYY-MM-DD HH:MM[:SS[.fff]]" (with ' ' or 'T') or integer epoch seconds.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

/// "YYYY-MM-DD HH:MM:SS".
std::string format_timestamp(std::int64_t seconds);
std::string format_minute(MinuteStamp minute);

TickParseResult parse_ticks(const std::filesystem::path& path, const TickFormat& format = {});
TickParseResult parse_ticks_text(std::string_view text, const TickFormat& format = {});

enum class FillPolicy { carry_forward, drop };

FillPolicy parse_fill_policy(std::string_view text);
std::string_view to_string(FillPolicy policy) noexcept;

struct ResampleResult {
  MinuteBarSeries bars;
  std::size_t discarded_ticks = 0;  // outside every session
  std::size_t filled_minutes = 0;   // carried forward, no trade in the minute
};

/// One bar per in-session minute between the first and the last in-session
/// tick. A bar labelled L carries the last trade with time < L + 60 s.
/// Only days with at least one in-session tick are trading days.
ResampleResult resample_to_minutes(std::span<const TickRecord> ticks, const SessionCalendar& cal,
                                   FillPolicy fill = FillPolicy::carry_forward);

/// Bars as ticks stamped at the bar label (used to check idempotence).
std::vector<TickRecord> bars_as_ticks(const MinuteBarSeries& bars);

}  // namespace vri
