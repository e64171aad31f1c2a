#pragma once

#include "hotspot/data.hpp"
#include "hotspot/geo.hpp"

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace hotspot {

struct StationDistance {
  std::string station_id;
  double distance_km = 0.0;
  std::size_t index = 0;  // position in the input station list
};

struct JoinedRecord {
  AccidentRecord accident;
  WeatherObservation weather;
  double station_distance_km = 0.0;
};

// All stations ordered by haversine distance from p; exact ties go to the
// lexicographically smaller station_id.
std::vector<StationDistance> nearest_station(const GeoPoint& p, std::span<const StationSeries> stations);

// Weather for the accident's hour (shifted by offset_hours) from the nearest
// station that has an observation at that hour. Throws NoWeatherAvailable
// when none does.
JoinedRecord join_weather(const AccidentRecord& accident, std::span<const StationSeries> stations,
                          int offset_hours = 0);

struct JoinResult {
  std::vector<JoinedRecord> records;  // input order
  RejectLog rejects;                  // row = 1-based position of the accident in the input
};

// Joins every accident; those without any weather are logged, not thrown.
JoinResult join_all(std::span<const AccidentRecord> accidents, std::span<const StationSeries> stations,
                    int offset_hours = 0);

inline constexpr std::string_view kJoinedHeader =
    "id,latitude,longitude,speed_limit_kmh,timestamp,station_id,station_lat,station_lon,hour_stamp,"
    "temp_c,humidity_pct,pressure_hpa,wind_ms,solar_rad_kj_m2,rain_mm,station_distance_km";

void write_joined(std::ostream& out, std::span<const JoinedRecord> records);
// Reads a file produced by write_joined. Throws MalformedHeader or
// InvalidArgument on malformed content (joined files are machine-written).
std::vector<JoinedRecord> read_joined(std::istream& in);

}  // namespace hotspot
