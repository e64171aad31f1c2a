#pragma once

#include "hotspot/fuse.hpp"
#include "hotspot/labeling.hpp"
#include "hotspot/random.hpp"

#include <string>
#include <vector>

namespace testing {

inline hotspot::JoinedRecord joined(double lat, double lon, hotspot::LocalDateTime ts, int speed = 60,
                                    double temp = 22.0) {
  hotspot::JoinedRecord r;
  r.accident = {"r", hotspot::GeoPoint(lat, lon), speed, ts};
  r.weather.station_id = "A001";
  r.weather.station_location = hotspot::GeoPoint(-15.789, -47.926);
  r.weather.hour = ts.truncated();
  r.weather.temperature_c = temp;
  r.weather.humidity_pct = 55.0;
  r.weather.pressure_hpa = 888.0;
  r.weather.wind_ms = 2.0;
  r.weather.solar_rad_kj_m2 = 1500.0;
  r.weather.rain_mm = 0.0;
  return r;
}

// Random records inside the box, all in `year`.
inline std::vector<hotspot::JoinedRecord> random_joined(hotspot::rng::Engine& eng, const hotspot::BoundingBox& box,
                                                        int n, int year) {
  std::vector<hotspot::JoinedRecord> out;
  for (int i = 0; i < n; ++i) {
    const hotspot::LocalDateTime ts{year, 1 + static_cast<int>(hotspot::rng::below(eng, 12)),
                                    1 + static_cast<int>(hotspot::rng::below(eng, 28)),
                                    static_cast<int>(hotspot::rng::below(eng, 24)), 0};
    auto r = joined(hotspot::rng::uniform(eng, box.min.lat, box.max.lat),
                    hotspot::rng::uniform(eng, box.min.lon, box.max.lon), ts,
                    40 + 20 * static_cast<int>(hotspot::rng::below(eng, 3)), hotspot::rng::normal(eng, 22.0, 3.0));
    r.accident.id = std::to_string(year) + "-" + std::to_string(i);
    out.push_back(r);
  }
  return out;
}

inline hotspot::DesignMatrix design(std::vector<std::string> names, std::vector<std::vector<double>> rows,
                                    std::vector<double> targets) {
  hotspot::DesignMatrix m;
  m.feature_names = std::move(names);
  m.rows = rows.size();
  for (const auto& r : rows) m.values.insert(m.values.end(), r.begin(), r.end());
  m.targets = std::move(targets);
  return m;
}

}  // namespace testing
