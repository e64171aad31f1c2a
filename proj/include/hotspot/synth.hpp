#pragma once

#include "hotspot/data.hpp"
#include "hotspot/geo.hpp"
#include "hotspot/json_io.hpp"

#include <cstdint>
#include <vector>

namespace hotspot {

struct Hotspot {
  GeoPoint center;
  double stddev_km = 0.6;
  double weight = 1.0;
};

// Urban centres of the Federal District, heaviest first. Centres are nudged
// (by at most ~2 km) so each cluster sits inside one cell of the default
// 80-cell grid.
std::vector<Hotspot> default_hotspots();

struct SynthConfig {
  BoundingBox bbox = federal_district_bbox();
  std::vector<Hotspot> hotspots = default_hotspots();
  double uniform_fraction = 0.05;
  int n_per_year = 1900;
  double year_drift_km = 0.5;
  // Probability that a year-B accident repeats a year-A site (same offset
  // from its hotspot centre). 0 draws every year-B point afresh.
  double site_persistence = 1.0;
  int n_stations = 5;
  int year_a = 2020;
  int year_b = 2021;
  std::uint64_t seed = 42;
};

// Throws ImpossibleConfig.
void validate(const SynthConfig& config);

struct SynthData {
  std::vector<AccidentRecord> year_a;
  std::vector<AccidentRecord> year_b;
  std::vector<StationSeries> stations;  // hourly over both years, sorted by id
};

SynthData generate(const SynthConfig& config);

Json to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const Json& j);

// Config, seed and per-year counts; contains nothing run-dependent.
Json make_manifest(const SynthConfig& config, const SynthData& data);

}  // namespace hotspot
