#include "hotspot/data.hpp"
#include "hotspot/csv.hpp"
#include "hotspot/error.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <unordered_map>
#include <variant>

namespace hotspot {

namespace {

namespace chr = std::chrono;

std::optional<int> parse_digits(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int value = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') return std::nullopt;
    value = value * 10 + (ch - '0');
  }
  return value;
}

chr::sys_days to_sys_days(int year, int month, int day) {
  return chr::sys_days{chr::year{year} / chr::month{static_cast<unsigned>(month)} /
                       chr::day{static_cast<unsigned>(day)}};
}

std::string strip_bom(std::string line) {
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  return line;
}

void expect_header(std::istream& in, std::string_view expected, std::string_view what) {
  std::string line;
  if (!csv::read_line(in, line)) {
    throw Error(ErrorCode::MalformedHeader, std::string(what) + ": missing header row");
  }
  line = strip_bom(std::move(line));
  if (csv::split(line) != csv::split(expected)) {
    throw Error(ErrorCode::MalformedHeader,
                std::string(what) + ": expected header '" + std::string(expected) + "', got '" + line + "'");
  }
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

// Field-level validation outcome; first failure wins.
struct RowError {
  RejectReason reason;
  std::string message;
};

}  // namespace

bool is_valid_date(int year, int month, int day) noexcept {
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  return chr::year_month_day{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                             chr::day{static_cast<unsigned>(day)}}
      .ok();
}

int weekday(int year, int month, int day) {
  return static_cast<int>(chr::weekday{to_sys_days(year, month, day)}.c_encoding());
}

HourStamp shift_hours(const HourStamp& stamp, int hours) {
  const auto tp = chr::sys_time<chr::hours>{to_sys_days(stamp.year, stamp.month, stamp.day)} +
                  chr::hours{stamp.hour + hours};
  const auto days = chr::floor<chr::days>(tp);
  const chr::year_month_day ymd{days};
  return HourStamp{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
                   static_cast<int>(static_cast<unsigned>(ymd.day())),
                   static_cast<int>((tp - days).count())};
}

std::optional<LocalDateTime> parse_datetime(std::string_view text) {
  if (text.size() != 16 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':') {
    return std::nullopt;
  }
  const auto y = parse_digits(text.substr(0, 4));
  const auto mo = parse_digits(text.substr(5, 2));
  const auto d = parse_digits(text.substr(8, 2));
  const auto h = parse_digits(text.substr(11, 2));
  const auto mi = parse_digits(text.substr(14, 2));
  if (!y || !mo || !d || !h || !mi) return std::nullopt;
  if (!is_valid_date(*y, *mo, *d) || *h > 23 || *mi > 59) return std::nullopt;
  return LocalDateTime{*y, *mo, *d, *h, *mi};
}

std::string format_datetime(const LocalDateTime& dt) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d", dt.year, dt.month, dt.day, dt.hour, dt.minute);
  return buf;
}

std::optional<HourStamp> parse_hour_stamp(std::string_view text) {
  const auto dt = parse_datetime(text);
  if (!dt || dt->minute != 0) return std::nullopt;
  return dt->truncated();
}

std::string format_hour_stamp(const HourStamp& stamp) {
  return format_datetime(LocalDateTime{stamp.year, stamp.month, stamp.day, stamp.hour, 0});
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::MissingField: return "MissingField";
    case RejectReason::BadNumber: return "BadNumber";
    case RejectReason::OutOfBounds: return "OutOfBounds";
    case RejectReason::BadTimestamp: return "BadTimestamp";
    case RejectReason::DuplicateHour: return "DuplicateHour";
    case RejectReason::InconsistentStation: return "InconsistentStation";
    case RejectReason::NoWeatherAvailable: return "NoWeatherAvailable";
  }
  return "Unknown";
}

void write_reject_log(std::ostream& out, const RejectLog& log) {
  out << "row,reason,message\n";
  for (const auto& e : log.entries) {
    out << e.row << ',' << to_string(e.reason) << ',' << csv::quote(e.message) << '\n';
  }
}

AccidentParseResult parse_accidents(std::istream& in, const BoundingBox& bbox, YearRange years) {
  expect_header(in, kAccidentHeader, "accidents");
  static const char* const kNames[] = {"id", "latitude", "longitude", "speed_limit_kmh", "timestamp"};

  AccidentParseResult result;
  std::string line;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++result.input_rows;

    const auto fields = csv::split(line);
    const auto check = [&]() -> std::variant<AccidentRecord, RowError> {
      if (fields.size() != 5) {
        return RowError{RejectReason::MissingField,
                        "expected 5 fields, got " + std::to_string(fields.size())};
      }
      for (std::size_t i = 0; i < 5; ++i) {
        if (fields[i].empty() || is_blank(fields[i])) {
          return RowError{RejectReason::MissingField, std::string(kNames[i]) + " is empty"};
        }
      }
      const auto lat = csv::parse_double(fields[1]);
      const auto lon = csv::parse_double(fields[2]);
      if (!lat) return RowError{RejectReason::BadNumber, "latitude '" + fields[1] + "' is not a number"};
      if (!lon) return RowError{RejectReason::BadNumber, "longitude '" + fields[2] + "' is not a number"};
      const auto speed = csv::parse_int(fields[3]);
      if (!speed) {
        return RowError{RejectReason::BadNumber, "speed_limit_kmh '" + fields[3] + "' is not an integer"};
      }
      if (*speed < kMinSpeedLimit || *speed > kMaxSpeedLimit) {
        return RowError{RejectReason::BadNumber,
                        "speed_limit_kmh " + fields[3] + " outside [10, 130]"};
      }
      if (!is_valid_lat_lon(*lat, *lon) || !bbox.contains(GeoPoint(*lat, *lon))) {
        return RowError{RejectReason::OutOfBounds,
                        "location (" + fields[1] + ", " + fields[2] + ") outside the study area"};
      }
      const auto ts = parse_datetime(fields[4]);
      if (!ts) return RowError{RejectReason::BadTimestamp, "timestamp '" + fields[4] + "' is not YYYY-MM-DDTHH:MM"};
      if (!years.contains(ts->year)) {
        return RowError{RejectReason::BadTimestamp, "year " + std::to_string(ts->year) + " outside the study range"};
      }
      return AccidentRecord{fields[0], GeoPoint(*lat, *lon), static_cast<int>(*speed), *ts};
    }();

    if (auto* rec = std::get_if<AccidentRecord>(&check)) {
      result.records.push_back(std::move(*rec));
    } else {
      auto& err = std::get<RowError>(check);
      result.rejects.add(line_no, err.reason, err.message);
    }
  }
  return result;
}

WeatherParseResult parse_weather(std::istream& in) {
  expect_header(in, kWeatherHeader, "weather");
  static const char* const kNames[] = {"station_id", "station_lat",  "station_lon", "hour_stamp",
                                       "temp_c",     "humidity_pct", "pressure_hpa", "wind_ms",
                                       "solar_rad_kj_m2", "rain_mm"};

  WeatherParseResult result;
  std::map<std::string, StationSeries> by_station;
  std::string line;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++result.input_rows;

    const auto fields = csv::split(line);
    const auto check = [&]() -> std::variant<WeatherObservation, RowError> {
      if (fields.size() != 10) {
        return RowError{RejectReason::MissingField,
                        "expected 10 fields, got " + std::to_string(fields.size())};
      }
      for (std::size_t i = 0; i < 10; ++i) {
        if (fields[i].empty() || is_blank(fields[i])) {
          return RowError{RejectReason::MissingField, std::string(kNames[i]) + " is empty"};
        }
      }
      double values[10] = {};
      for (std::size_t i : {1u, 2u, 4u, 5u, 6u, 7u, 8u, 9u}) {
        const auto v = csv::parse_double(fields[i]);
        if (!v) return RowError{RejectReason::BadNumber, std::string(kNames[i]) + " '" + fields[i] + "' is not a number"};
        values[i] = *v;
      }
      if (!is_valid_lat_lon(values[1], values[2])) {
        return RowError{RejectReason::BadNumber, "station coordinates out of range"};
      }
      if (values[5] < 0.0 || values[5] > 100.0) {
        return RowError{RejectReason::BadNumber, "humidity_pct " + fields[5] + " outside [0, 100]"};
      }
      for (std::size_t i : {7u, 8u, 9u}) {
        if (values[i] < 0.0) return RowError{RejectReason::BadNumber, std::string(kNames[i]) + " is negative"};
      }
      const auto hour = parse_hour_stamp(fields[3]);
      if (!hour) return RowError{RejectReason::BadTimestamp, "hour_stamp '" + fields[3] + "' is not YYYY-MM-DDTHH:00"};
      WeatherObservation obs;
      obs.station_id = fields[0];
      obs.station_location = GeoPoint(values[1], values[2]);
      obs.hour = *hour;
      obs.temperature_c = values[4];
      obs.humidity_pct = values[5];
      obs.pressure_hpa = values[6];
      obs.wind_ms = values[7];
      obs.solar_rad_kj_m2 = values[8];
      obs.rain_mm = values[9];
      return obs;
    }();

    if (const auto* err = std::get_if<RowError>(&check)) {
      result.rejects.add(line_no, err->reason, err->message);
      continue;
    }
    const auto& obs = std::get<WeatherObservation>(check);
    auto [it, inserted] = by_station.try_emplace(obs.station_id);
    auto& series = it->second;
    if (inserted) {
      series.station_id = obs.station_id;
      series.station_location = obs.station_location;
    } else if (!(series.station_location == obs.station_location)) {
      result.rejects.add(line_no, RejectReason::InconsistentStation,
                         "station " + obs.station_id + " location differs from its first row");
      continue;
    }
    if (!series.observations.try_emplace(obs.hour, obs).second) {
      result.rejects.add(line_no, RejectReason::DuplicateHour,
                         "station " + obs.station_id + " already has " + format_hour_stamp(obs.hour));
    }
  }
  for (auto& [id, series] : by_station) result.stations.push_back(std::move(series));
  return result;
}

void write_accidents(std::ostream& out, const std::vector<AccidentRecord>& records) {
  out << kAccidentHeader << '\n';
  for (const auto& r : records) {
    out << csv::quote(r.id) << ',' << csv::format_double(r.location.lat) << ','
        << csv::format_double(r.location.lon) << ',' << r.speed_limit_kmh << ','
        << format_datetime(r.timestamp) << '\n';
  }
}

void write_weather(std::ostream& out, const std::vector<StationSeries>& stations) {
  out << kWeatherHeader << '\n';
  for (const auto& s : stations) {
    const std::string prefix = csv::quote(s.station_id) + ',' + csv::format_double(s.station_location.lat) +
                               ',' + csv::format_double(s.station_location.lon) + ',';
    for (const auto& [hour, o] : s.observations) {
      out << prefix << format_hour_stamp(hour) << ',' << csv::format_double(o.temperature_c) << ','
          << csv::format_double(o.humidity_pct) << ',' << csv::format_double(o.pressure_hpa) << ','
          << csv::format_double(o.wind_ms) << ',' << csv::format_double(o.solar_rad_kj_m2) << ','
          << csv::format_double(o.rain_mm) << '\n';
    }
  }
}

}  // namespace hotspot
