#include "hotspot/synth.hpp"
#include "hotspot/error.hpp"
#include "hotspot/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

namespace hotspot {

std::vector<Hotspot> default_hotspots() {
  return {
      {GeoPoint(-15.794, -47.875), 0.6, 3.0},  // Plano Piloto
      {GeoPoint(-15.845, -48.055), 0.6, 2.0},  // Taguatinga
      {GeoPoint(-15.805, -48.125), 0.6, 2.0},  // Ceilandia
      {GeoPoint(-15.875, -48.075), 0.6, 1.5},  // Samambaia
      {GeoPoint(-16.015, -48.065), 0.6, 1.0},  // Gama
      {GeoPoint(-15.650, -47.780), 0.6, 1.0},  // Sobradinho
      {GeoPoint(-15.620, -47.650), 0.6, 1.0},  // Planaltina
      {GeoPoint(-15.800, -47.975), 0.6, 1.0},  // Guara
      {GeoPoint(-15.845, -48.025), 0.6, 1.0},  // Aguas Claras
      {GeoPoint(-15.920, -48.065), 0.6, 1.0},  // Recanto das Emas
      {GeoPoint(-16.005, -48.030), 0.6, 1.0},  // Santa Maria
      {GeoPoint(-15.915, -47.780), 0.6, 0.8},  // Sao Sebastiao
      {GeoPoint(-15.770, -47.780), 0.6, 0.8},  // Paranoa
      {GeoPoint(-15.665, -48.180), 0.6, 0.6},  // Brazlandia
  };
}

namespace {

struct StationSite {
  const char* id;
  double lat;
  double lon;
  double pressure_hpa;
};

// Automatic stations of the Federal District.
constexpr std::array<StationSite, 5> kStations{{
    {"A001", -15.789, -47.926, 886.5},
    {"A042", -15.599, -48.131, 889.0},
    {"A045", -15.597, -47.626, 893.5},
    {"A046", -15.935, -48.137, 897.0},
    {"A047", -16.012, -47.558, 901.0},
}};

constexpr std::array<int, 3> kSpeedLimits{40, 60, 80};

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

GeoPoint offset_point(const GeoPoint& centre, double north_km, double east_km) {
  return {centre.lat + north_km / km_per_deg_lat(), centre.lon + east_km / km_per_deg_lon(centre.lat)};
}

// Rounded to 1e-6 degrees; nullopt if it falls outside the box.
std::optional<GeoPoint> settle(const BoundingBox& bbox, double lat, double lon) {
  lat = round_to(lat, 1e6);
  lon = round_to(lon, 1e6);
  if (!is_valid_lat_lon(lat, lon)) return std::nullopt;
  GeoPoint p(lat, lon);
  if (!bbox.contains(p)) return std::nullopt;
  return p;
}

GeoPoint uniform_point(rng::Engine& eng, const BoundingBox& bbox) {
  for (;;) {
    const double lat = rng::uniform(eng, bbox.min.lat, bbox.max.lat);
    const double lon = rng::uniform(eng, bbox.min.lon, bbox.max.lon);
    if (auto p = settle(bbox, lat, lon)) return *p;
  }
}

struct Offset {
  double north_km;
  double east_km;
};

// Gaussian offset around `centre` whose point lies inside the box.
Offset draw_offset(rng::Engine& eng, const BoundingBox& bbox, const GeoPoint& centre, double sd) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Offset o{rng::normal(eng, 0.0, sd), rng::normal(eng, 0.0, sd)};
    const GeoPoint p = offset_point(centre, o.north_km, o.east_km);
    if (settle(bbox, p.lat, p.lon)) return o;
  }
  throw Error(ErrorCode::ImpossibleConfig, "hotspot mass lies almost entirely outside the bounding box");
}

// Largest-remainder apportionment of `total` by `weights`.
std::vector<int> apportion(int total, const std::vector<double>& weights) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  std::vector<int> out(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = total * weights[i] / sum;
    out[i] = static_cast<int>(std::floor(quota));
    assigned += out[i];
    remainders.emplace_back(quota - out[i], i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; k < total - assigned; ++k) ++out[remainders[static_cast<std::size_t>(k)].second];
  return out;
}

int days_in_year(int year) { return is_valid_date(year, 2, 29) ? 366 : 365; }

LocalDateTime draw_timestamp(rng::Engine& eng, int year) {
  static constexpr std::array<int, 24> kHourWeights = [] {
    std::array<int, 24> w{};
    w.fill(1);
    for (int h : {7, 8, 9, 17, 18, 19}) w[static_cast<std::size_t>(h)] = 3;
    return w;
  }();
  static constexpr int kHourTotal = 24 + 2 * 6;

  const int day_of_year = static_cast<int>(rng::below(eng, static_cast<std::uint64_t>(days_in_year(year))));
  HourStamp day = shift_hours(HourStamp{year, 1, 1, 0}, 24 * day_of_year);
  int pick = static_cast<int>(rng::below(eng, kHourTotal));
  int hour = 0;
  while (pick >= kHourWeights[static_cast<std::size_t>(hour)]) pick -= kHourWeights[static_cast<std::size_t>(hour++)];
  const int minute = static_cast<int>(rng::below(eng, 60));
  return {day.year, day.month, day.day, hour, minute};
}

struct Placed {
  GeoPoint location;
  int speed_limit;
};

std::vector<AccidentRecord> finalize_year(rng::Engine& eng, const std::vector<Placed>& placed, int year) {
  std::vector<AccidentRecord> out;
  out.reserve(placed.size());
  for (const auto& p : placed) {
    out.push_back(AccidentRecord{"", p.location, p.speed_limit, draw_timestamp(eng, year)});
  }
  std::stable_sort(out.begin(), out.end(), [](const AccidentRecord& a, const AccidentRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.location.lat != b.location.lat) return a.location.lat < b.location.lat;
    return a.location.lon < b.location.lon;
  });
  char id[32];
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::snprintf(id, sizeof(id), "%d-%05zu", year, i + 1);
    out[i].id = id;
  }
  return out;
}

StationSeries make_station(rng::Engine& eng, std::string id, GeoPoint location, double base_pressure, int first_year,
                           int last_year) {
  StationSeries series{std::move(id), location, {}};
  const double temp_bias = rng::normal(eng, 0.0, 0.7);
  const HourStamp end{last_year + 1, 1, 1, 0};
  for (HourStamp h{first_year, 1, 1, 0}; h < end; h = shift_hours(h, 1)) {
    const double phase = 2.0 * std::numbers::pi * (h.hour - 9) / 24.0;
    const double temp = 22.0 + temp_bias + 5.0 * std::sin(phase) + rng::normal(eng, 0.0, 0.8);
    const double humidity = std::clamp(65.0 - 3.0 * (temp - 22.0) + rng::normal(eng, 0.0, 6.0), 10.0, 100.0);
    const double pressure =
        base_pressure + 1.2 * std::sin(4.0 * std::numbers::pi * h.hour / 24.0) + rng::normal(eng, 0.0, 0.4);
    const double wind = std::clamp(std::abs(rng::normal(eng, 2.2, 1.3)), 0.0, 15.0);
    double solar = 0.0;
    const double cloud = rng::uniform(eng, 0.4, 1.0);
    if (h.hour > 6 && h.hour < 18) solar = 3200.0 * std::sin(std::numbers::pi * (h.hour - 6) / 12.0) * cloud;
    double rain = 0.0;
    if (rng::uniform01(eng) < 0.08) rain = std::min(60.0, -2.0 * std::log1p(-rng::uniform01(eng)));
    series.observations.emplace(h, WeatherObservation{series.station_id, location, h, round_to(temp, 10.0),
                                                      round_to(humidity, 10.0), round_to(pressure, 10.0),
                                                      round_to(wind, 10.0), round_to(solar, 10.0),
                                                      round_to(rain, 10.0)});
  }
  return series;
}

}  // namespace

void validate(const SynthConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ImpossibleConfig, msg); };
  if (c.hotspots.empty() && c.uniform_fraction <= 0.0) fail("no hotspots and uniform_fraction 0");
  if (!(c.uniform_fraction >= 0.0 && c.uniform_fraction <= 1.0)) fail("uniform_fraction must lie in [0, 1]");
  if (c.n_per_year < 1) fail("n_per_year must be >= 1");
  if (!(c.year_drift_km >= 0.0) || !std::isfinite(c.year_drift_km)) fail("year_drift_km must be >= 0");
  if (!(c.site_persistence >= 0.0 && c.site_persistence <= 1.0)) fail("site_persistence must lie in [0, 1]");
  if (c.n_stations < 1) fail("at least one weather station is required");
  if (c.year_a == c.year_b) fail("year_a and year_b must differ");
  for (int y : {c.year_a, c.year_b}) {
    if (y < 1 || y > 9998) fail("years must lie in 1..9998");
  }
  for (const auto& h : c.hotspots) {
    if (!(h.weight > 0.0) || !std::isfinite(h.weight)) fail("hotspot weights must be positive");
    if (!(h.stddev_km > 0.0) || !std::isfinite(h.stddev_km)) fail("hotspot stddev_km must be positive");
  }
}

SynthData generate(const SynthConfig& c) {
  validate(c);
  rng::Engine eng = rng::make_engine(c.seed);

  const int n_uniform = c.hotspots.empty()
                            ? c.n_per_year
                            : static_cast<int>(std::lround(c.uniform_fraction * c.n_per_year));
  std::vector<double> weights;
  for (const auto& h : c.hotspots) weights.push_back(h.weight);
  const std::vector<int> quota = c.hotspots.empty() ? std::vector<int>{} : apportion(c.n_per_year - n_uniform, weights);

  std::vector<int> hotspot_speed;
  for (std::size_t i = 0; i < c.hotspots.size(); ++i) hotspot_speed.push_back(kSpeedLimits[rng::below(eng, 3)]);

  // Year A.
  std::vector<std::vector<Offset>> offsets(c.hotspots.size());
  std::vector<Placed> placed_a;
  for (std::size_t i = 0; i < c.hotspots.size(); ++i) {
    const auto& h = c.hotspots[i];
    for (int k = 0; k < quota[i]; ++k) {
      const Offset o = draw_offset(eng, c.bbox, h.center, h.stddev_km);
      offsets[i].push_back(o);
      const GeoPoint p = offset_point(h.center, o.north_km, o.east_km);
      placed_a.push_back({*settle(c.bbox, p.lat, p.lon), hotspot_speed[i]});
    }
  }
  std::vector<Placed> background;
  for (int k = 0; k < n_uniform; ++k) {
    background.push_back({uniform_point(eng, c.bbox), kSpeedLimits[rng::below(eng, 3)]});
  }
  placed_a.insert(placed_a.end(), background.begin(), background.end());

  // Year B: centres drift by at most year_drift_km; persistent sites keep their offsets.
  std::vector<Placed> placed_b;
  for (std::size_t i = 0; i < c.hotspots.size(); ++i) {
    const auto& h = c.hotspots[i];
    const double angle = rng::uniform(eng, 0.0, 2.0 * std::numbers::pi);
    const double magnitude = rng::uniform(eng, 0.0, c.year_drift_km);
    GeoPoint centre = offset_point(h.center, magnitude * std::sin(angle), magnitude * std::cos(angle));
    for (const Offset& kept : offsets[i]) {
      std::optional<GeoPoint> p;
      if (rng::uniform01(eng) < c.site_persistence) {
        const GeoPoint q = offset_point(centre, kept.north_km, kept.east_km);
        p = settle(c.bbox, q.lat, q.lon);
      }
      if (!p) {
        const Offset o = draw_offset(eng, c.bbox, centre, h.stddev_km);
        const GeoPoint q = offset_point(centre, o.north_km, o.east_km);
        p = settle(c.bbox, q.lat, q.lon);
      }
      placed_b.push_back({*p, hotspot_speed[i]});
    }
  }
  for (const auto& b : background) {
    if (rng::uniform01(eng) < c.site_persistence) {
      placed_b.push_back(b);
    } else {
      placed_b.push_back({uniform_point(eng, c.bbox), kSpeedLimits[rng::below(eng, 3)]});
    }
  }

  SynthData out;
  out.year_a = finalize_year(eng, placed_a, c.year_a);
  out.year_b = finalize_year(eng, placed_b, c.year_b);

  const int first_year = std::min(c.year_a, c.year_b);
  const int last_year = std::max(c.year_a, c.year_b);
  for (int s = 0; s < c.n_stations; ++s) {
    if (static_cast<std::size_t>(s) < kStations.size()) {
      const auto& site = kStations[static_cast<std::size_t>(s)];
      out.stations.push_back(
          make_station(eng, site.id, GeoPoint(site.lat, site.lon), site.pressure_hpa, first_year, last_year));
    } else {
      char id[16];
      std::snprintf(id, sizeof(id), "S%03d", s + 1);
      const GeoPoint where = uniform_point(eng, c.bbox);
      const double pressure = round_to(rng::uniform(eng, 885.0, 902.0), 10.0);
      out.stations.push_back(make_station(eng, id, where, pressure, first_year, last_year));
    }
  }
  std::sort(out.stations.begin(), out.stations.end(),
            [](const StationSeries& a, const StationSeries& b) { return a.station_id < b.station_id; });
  return out;
}

Json to_json(const SynthConfig& c) {
  Json hotspots = Json::array();
  for (const auto& h : c.hotspots) {
    hotspots.push_back({{"center", h.center}, {"stddev_km", h.stddev_km}, {"weight", h.weight}});
  }
  return Json{{"bbox", c.bbox},
              {"hotspots", hotspots},
              {"uniform_fraction", c.uniform_fraction},
              {"n_per_year", c.n_per_year},
              {"year_drift_km", c.year_drift_km},
              {"site_persistence", c.site_persistence},
              {"n_stations", c.n_stations},
              {"year_a", c.year_a},
              {"year_b", c.year_b},
              {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const Json& j) {
  SynthConfig c;
  if (j.contains("bbox")) c.bbox = j.at("bbox").get<BoundingBox>();
  if (j.contains("hotspots")) {
    c.hotspots.clear();
    for (const auto& h : j.at("hotspots")) {
      c.hotspots.push_back({h.at("center").get<GeoPoint>(), h.value("stddev_km", 0.6), h.value("weight", 1.0)});
    }
  }
  c.uniform_fraction = j.value("uniform_fraction", c.uniform_fraction);
  c.n_per_year = j.value("n_per_year", c.n_per_year);
  c.year_drift_km = j.value("year_drift_km", c.year_drift_km);
  c.site_persistence = j.value("site_persistence", c.site_persistence);
  c.n_stations = j.value("n_stations", c.n_stations);
  c.year_a = j.value("year_a", c.year_a);
  c.year_b = j.value("year_b", c.year_b);
  c.seed = j.value("seed", c.seed);
  return c;
}

Json make_manifest(const SynthConfig& config, const SynthData& data) {
  std::size_t observations = 0;
  for (const auto& s : data.stations) observations += s.observations.size();
  return Json{{"schema", "hotspot.synth-manifest/1"},
              {"config", to_json(config)},
              {"seed", config.seed},
              {"files", {{"accidents", "accidents.csv"}, {"weather", "weather.csv"}}},
              {"records", {{std::to_string(config.year_a), data.year_a.size()},
                           {std::to_string(config.year_b), data.year_b.size()}}},
              {"stations", data.stations.size()},
              {"weather_observations", observations}};
}

}  // namespace hotspot
