#include "hotspot/error.hpp"
#include "hotspot/fuse.hpp"
#include "hotspot/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace hotspot;

namespace {

StationSeries station(const std::string& id, double lat, double lon, std::initializer_list<HourStamp> hours,
                      double temp = 20.0) {
  StationSeries s{id, GeoPoint(lat, lon), {}};
  for (const auto& h : hours) {
    WeatherObservation o;
    o.station_id = id;
    o.station_location = s.station_location;
    o.hour = h;
    o.temperature_c = temp;
    o.humidity_pct = 50;
    o.pressure_hpa = 890;
    s.observations.emplace(h, o);
  }
  return s;
}

AccidentRecord accident(const std::string& id, double lat, double lon, LocalDateTime ts) {
  return AccidentRecord{id, GeoPoint(lat, lon), 60, ts};
}

// Independent oracle: nearest station that has the hour, by recomputed distance.
std::string brute_nearest_with_data(const GeoPoint& p, const std::vector<StationSeries>& stations,
                                    const HourStamp& hour) {
  std::string best;
  double best_d = 1e300;
  for (const auto& s : stations) {
    if (!s.find(hour)) continue;
    const double d = haversine_km(p, s.station_location);
    if (d < best_d || (d == best_d && s.station_id < best)) {
      best_d = d;
      best = s.station_id;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("nearest_station ordering") {
  const HourStamp h{2020, 1, 1, 10};
  SUBCASE("point on a station") {
    const std::vector<StationSeries> st{station("B", -15.6, -48.1, {h}), station("A", -15.8, -47.9, {h})};
    const auto order = nearest_station(GeoPoint(-15.8, -47.9), st);
    CHECK(order[0].station_id == "A");
    CHECK(order[0].distance_km == 0.0);
  }
  SUBCASE("equidistant stations go to the lower id") {
    // Mirror images about the meridian through p.
    const std::vector<StationSeries> st{station("Z", -15.75, -47.5, {h}), station("M", -15.75, -48.5, {h})};
    const auto order = nearest_station(GeoPoint(-15.75, -48.0), st);
    REQUIRE(order[0].distance_km == order[1].distance_km);
    CHECK(order[0].station_id == "M");
  }
  SUBCASE("matches an independent re-sort") {
    rng::Engine eng = rng::make_engine(21);
    const BoundingBox fd = federal_district_bbox();
    std::vector<StationSeries> st;
    for (int i = 0; i < 5; ++i) {
      st.push_back(station("S" + std::to_string(i), rng::uniform(eng, fd.min.lat, fd.max.lat),
                           rng::uniform(eng, fd.min.lon, fd.max.lon), {h}));
    }
    for (int k = 0; k < 50; ++k) {
      const GeoPoint p(rng::uniform(eng, fd.min.lat, fd.max.lat), rng::uniform(eng, fd.min.lon, fd.max.lon));
      std::vector<std::pair<double, std::string>> oracle;
      for (const auto& s : st) oracle.emplace_back(haversine_km(p, s.station_location), s.station_id);
      std::sort(oracle.begin(), oracle.end());
      const auto order = nearest_station(p, st);
      REQUIRE(order.size() == oracle.size());
      for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i].station_id == oracle[i].second);
    }
  }
}

TEST_CASE("join_weather picks the nearest station that has the hour") {
  const HourStamp h10{2020, 1, 1, 10};
  const HourStamp h11{2020, 1, 1, 11};
  const std::vector<StationSeries> st{station("NEAR", -15.80, -47.90, {h10}, 21.0),
                                      station("FAR", -15.60, -48.10, {h10, h11}, 25.0)};
  const auto a = accident("x", -15.81, -47.91, {2020, 1, 1, 10, 42});

  const JoinedRecord j = join_weather(a, st);
  CHECK(j.weather.station_id == "NEAR");
  CHECK(j.weather.hour == h10);
  CHECK(j.station_distance_km == doctest::Approx(haversine_km(a.location, st[0].station_location)));

  const JoinedRecord shifted = join_weather(a, st, 1);
  CHECK(shifted.weather.station_id == "FAR");
  CHECK(shifted.weather.hour == h11);

  try {
    join_weather(a, st, 2);
    FAIL("expected NoWeatherAvailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoWeatherAvailable);
  }
}

TEST_CASE("join_all logs missing weather and keeps input order") {
  const HourStamp h{2020, 1, 1, 10};
  const std::vector<StationSeries> st{station("A", -15.8, -47.9, {h})};
  const std::vector<AccidentRecord> acc{accident("1", -15.8, -47.9, {2020, 1, 1, 10, 0}),
                                        accident("2", -15.8, -47.9, {2020, 1, 1, 11, 0}),
                                        accident("3", -15.7, -47.9, {2020, 1, 1, 10, 59})};
  const JoinResult r = join_all(acc, st);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].accident.id == "1");
  CHECK(r.records[1].accident.id == "3");
  REQUIRE(r.rejects.size() == 1);
  CHECK(r.rejects.entries[0].row == 2);
  CHECK(r.rejects.entries[0].reason == RejectReason::NoWeatherAvailable);
}

TEST_CASE("join invariant: no strictly closer station has data (random gaps)") {
  rng::Engine eng = rng::make_engine(33);
  const BoundingBox fd = federal_district_bbox();
  std::vector<StationSeries> st;
  for (int i = 0; i < 5; ++i) {
    StationSeries s{"S" + std::to_string(i),
                    GeoPoint(rng::uniform(eng, fd.min.lat, fd.max.lat), rng::uniform(eng, fd.min.lon, fd.max.lon)),
                    {}};
    for (int hr = 0; hr < 24; ++hr) {
      if (rng::uniform01(eng) < 0.4) continue;  // gap
      WeatherObservation o;
      o.station_id = s.station_id;
      o.station_location = s.station_location;
      o.hour = {2020, 6, 1, hr};
      s.observations.emplace(o.hour, o);
    }
    st.push_back(std::move(s));
  }
  std::vector<AccidentRecord> acc;
  for (int k = 0; k < 300; ++k) {
    acc.push_back(accident(std::to_string(k), rng::uniform(eng, fd.min.lat, fd.max.lat),
                           rng::uniform(eng, fd.min.lon, fd.max.lon),
                           {2020, 6, 1, static_cast<int>(rng::below(eng, 24)), 0}));
  }
  const JoinResult r = join_all(acc, st);
  CHECK(r.records.size() + r.rejects.size() == acc.size());
  for (const auto& j : r.records) {
    CHECK(j.weather.station_id == brute_nearest_with_data(j.accident.location, st, j.weather.hour));
    CHECK(j.weather.hour == j.accident.timestamp.truncated());
  }

  // Order independence: reversing the input reverses the output.
  std::vector<AccidentRecord> rev(acc.rbegin(), acc.rend());
  const JoinResult rr = join_all(rev, st);
  REQUIRE(rr.records.size() == r.records.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& x = r.records[i];
    const auto& y = rr.records[r.records.size() - 1 - i];
    CHECK(x.accident == y.accident);
    CHECK(x.weather == y.weather);
  }
}

TEST_CASE("joined CSV round-trip") {
  const HourStamp h{2020, 1, 1, 10};
  const std::vector<StationSeries> st{station("A", -15.8, -47.9, {h}, 23.7)};
  const std::vector<AccidentRecord> acc{accident("p,q", -15.812345, -47.91, {2020, 1, 1, 10, 5})};
  const JoinResult r = join_all(acc, st);
  std::ostringstream out;
  write_joined(out, r.records);
  CHECK(out.str().rfind(std::string(kJoinedHeader) + "\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_joined(in);
  REQUIRE(back.size() == 1);
  CHECK(back[0].accident == r.records[0].accident);
  CHECK(back[0].weather == r.records[0].weather);
  CHECK(back[0].station_distance_km == r.records[0].station_distance_km);
}
