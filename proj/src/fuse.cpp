#include "hotspot/fuse.hpp"
#include "hotspot/csv.hpp"
#include "hotspot/error.hpp"

#include <algorithm>

namespace hotspot {

std::vector<StationDistance> nearest_station(const GeoPoint& p, std::span<const StationSeries> stations) {
  std::vector<StationDistance> order;
  order.reserve(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i) {
    order.push_back({stations[i].station_id, haversine_km(p, stations[i].station_location), i});
  }
  std::sort(order.begin(), order.end(), [](const StationDistance& a, const StationDistance& b) {
    if (a.distance_km != b.distance_km) return a.distance_km < b.distance_km;
    if (a.station_id != b.station_id) return a.station_id < b.station_id;
    return a.index < b.index;
  });
  return order;
}

JoinedRecord join_weather(const AccidentRecord& accident, std::span<const StationSeries> stations,
                          int offset_hours) {
  if (stations.empty()) throw Error(ErrorCode::InvalidArgument, "no weather stations");
  const HourStamp target = shift_hours(accident.timestamp.truncated(), offset_hours);
  for (const auto& candidate : nearest_station(accident.location, stations)) {
    if (const auto* obs = stations[candidate.index].find(target)) {
      return JoinedRecord{accident, *obs, candidate.distance_km};
    }
  }
  throw Error(ErrorCode::NoWeatherAvailable,
              "accident " + accident.id + ": no station has weather for " + format_hour_stamp(target));
}

JoinResult join_all(std::span<const AccidentRecord> accidents, std::span<const StationSeries> stations,
                    int offset_hours) {
  JoinResult result;
  result.records.reserve(accidents.size());
  for (std::size_t i = 0; i < accidents.size(); ++i) {
    try {
      result.records.push_back(join_weather(accidents[i], stations, offset_hours));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoWeatherAvailable) throw;
      result.rejects.add(i + 1, RejectReason::NoWeatherAvailable, e.what());
    }
  }
  return result;
}

void write_joined(std::ostream& out, std::span<const JoinedRecord> records) {
  out << kJoinedHeader << '\n';
  for (const auto& r : records) {
    const auto& a = r.accident;
    const auto& w = r.weather;
    out << csv::quote(a.id) << ',' << csv::format_double(a.location.lat) << ','
        << csv::format_double(a.location.lon) << ',' << a.speed_limit_kmh << ','
        << format_datetime(a.timestamp) << ',' << csv::quote(w.station_id) << ','
        << csv::format_double(w.station_location.lat) << ',' << csv::format_double(w.station_location.lon)
        << ',' << format_hour_stamp(w.hour) << ',' << csv::format_double(w.temperature_c) << ','
        << csv::format_double(w.humidity_pct) << ',' << csv::format_double(w.pressure_hpa) << ','
        << csv::format_double(w.wind_ms) << ',' << csv::format_double(w.solar_rad_kj_m2) << ','
        << csv::format_double(w.rain_mm) << ',' << csv::format_double(r.station_distance_km) << '\n';
  }
}

std::vector<JoinedRecord> read_joined(std::istream& in) {
  std::string line;
  if (!csv::read_line(in, line) || csv::split(line) != csv::split(kJoinedHeader)) {
    throw Error(ErrorCode::MalformedHeader, "joined file header does not match");
  }
  std::vector<JoinedRecord> records;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    const auto fail = [&](const std::string& what) {
      return Error(ErrorCode::InvalidArgument, "joined file line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 16) throw fail("expected 16 fields");
    const auto num = [&](std::size_t i) {
      const auto v = csv::parse_double(f[i]);
      if (!v) throw fail("field " + std::to_string(i + 1) + " is not a number");
      return *v;
    };
    JoinedRecord r;
    r.accident.id = f[0];
    r.accident.location = GeoPoint(num(1), num(2));
    r.accident.speed_limit_kmh = static_cast<int>(num(3));
    const auto ts = parse_datetime(f[4]);
    const auto hour = parse_hour_stamp(f[8]);
    if (!ts || !hour) throw fail("bad timestamp");
    r.accident.timestamp = *ts;
    r.weather.station_id = f[5];
    r.weather.station_location = GeoPoint(num(6), num(7));
    r.weather.hour = *hour;
    r.weather.temperature_c = num(9);
    r.weather.humidity_pct = num(10);
    r.weather.pressure_hpa = num(11);
    r.weather.wind_ms = num(12);
    r.weather.solar_rad_kj_m2 = num(13);
    r.weather.rain_mm = num(14);
    r.station_distance_km = num(15);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace hotspot
