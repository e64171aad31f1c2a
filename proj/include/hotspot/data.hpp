#pragma once

#include "hotspot/geo.hpp"

#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hotspot {

// Local civil date + hour; no timezone arithmetic.
struct HourStamp {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;

  friend auto operator<=>(const HourStamp&, const HourStamp&) = default;
};

struct LocalDateTime {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;

  HourStamp truncated() const noexcept { return {year, month, day, hour}; }

  friend auto operator<=>(const LocalDateTime&, const LocalDateTime&) = default;
};

bool is_valid_date(int year, int month, int day) noexcept;
// 0 = Sunday .. 6 = Saturday.
int weekday(int year, int month, int day);
// Hour arithmetic across day/month/year boundaries.
HourStamp shift_hours(const HourStamp& stamp, int hours);

// "YYYY-MM-DDTHH:MM". Returns nullopt on any format or calendar error.
std::optional<LocalDateTime> parse_datetime(std::string_view text);
std::string format_datetime(const LocalDateTime& dt);
// "YYYY-MM-DDTHH:00"
std::optional<HourStamp> parse_hour_stamp(std::string_view text);
std::string format_hour_stamp(const HourStamp& stamp);

struct AccidentRecord {
  std::string id;
  GeoPoint location;
  int speed_limit_kmh = 0;
  LocalDateTime timestamp;

  friend bool operator==(const AccidentRecord&, const AccidentRecord&) = default;
};

struct WeatherObservation {
  std::string station_id;
  GeoPoint station_location;
  HourStamp hour;
  double temperature_c = 0.0;
  double humidity_pct = 0.0;
  double pressure_hpa = 0.0;
  double wind_ms = 0.0;
  double solar_rad_kj_m2 = 0.0;
  double rain_mm = 0.0;

  friend bool operator==(const WeatherObservation&, const WeatherObservation&) = default;
};

struct StationSeries {
  std::string station_id;
  GeoPoint station_location;
  std::map<HourStamp, WeatherObservation> observations;

  const WeatherObservation* find(const HourStamp& hour) const {
    const auto it = observations.find(hour);
    return it == observations.end() ? nullptr : &it->second;
  }
};

enum class RejectReason {
  MissingField,
  BadNumber,
  OutOfBounds,
  BadTimestamp,
  DuplicateHour,
  InconsistentStation,
  NoWeatherAvailable,
};

std::string_view to_string(RejectReason reason);

struct RejectEntry {
  std::size_t row = 0;  // 1-based line number in the source file
  RejectReason reason = RejectReason::MissingField;
  std::string message;
};

struct RejectLog {
  std::vector<RejectEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  void add(std::size_t row, RejectReason reason, std::string message) {
    entries.push_back({row, reason, std::move(message)});
  }
};

// CSV: header "row,reason,message", one reject per line.
void write_reject_log(std::ostream& out, const RejectLog& log);

struct YearRange {
  int first = 1;
  int last = 9999;

  bool contains(int year) const noexcept { return year >= first && year <= last; }
};

inline constexpr int kMinSpeedLimit = 10;
inline constexpr int kMaxSpeedLimit = 130;

inline constexpr std::string_view kAccidentHeader = "id,latitude,longitude,speed_limit_kmh,timestamp";
inline constexpr std::string_view kWeatherHeader =
    "station_id,station_lat,station_lon,hour_stamp,temp_c,humidity_pct,pressure_hpa,wind_ms,"
    "solar_rad_kj_m2,rain_mm";

struct AccidentParseResult {
  std::vector<AccidentRecord> records;
  RejectLog rejects;
  std::size_t input_rows = 0;
};

struct WeatherParseResult {
  std::vector<StationSeries> stations;  // sorted by station_id
  RejectLog rejects;
  std::size_t input_rows = 0;
};

// Reads accidents.csv, dropping rows with nulls, unparsable values,
// coordinates outside `bbox` or timestamps outside `years`. Throws
// MalformedHeader when the header does not match kAccidentHeader.
AccidentParseResult parse_accidents(std::istream& in, const BoundingBox& bbox, YearRange years = {});

// Reads weather.csv into one series per station. A repeated (station, hour)
// keeps the first row and rejects the later one as DuplicateHour.
WeatherParseResult parse_weather(std::istream& in);

void write_accidents(std::ostream& out, const std::vector<AccidentRecord>& records);
void write_weather(std::ostream& out, const std::vector<StationSeries>& stations);

}  // namespace hotspot
