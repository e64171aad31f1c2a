#include "hotspot/labeling.hpp"
#include "hotspot/csv.hpp"
#include "hotspot/data.hpp"
#include "hotspot/error.hpp"

#include <algorithm>
#include <numeric>

namespace hotspot {

FeatureRow make_feature_row(const JoinedRecord& record) {
  const auto& a = record.accident;
  const auto& w = record.weather;
  const int dow = weekday(a.timestamp.year, a.timestamp.month, a.timestamp.day);
  return FeatureRow{
      a.location.lon,
      a.location.lat,
      static_cast<double>(a.speed_limit_kmh),
      static_cast<double>(a.timestamp.year),
      static_cast<double>(a.timestamp.month),
      (dow >= 1 && dow <= 5) ? 1.0 : 0.0,
      static_cast<double>(a.timestamp.hour),
      w.temperature_c,
      w.humidity_pct,
      w.pressure_hpa,
      w.wind_ms,
      w.solar_rad_kj_m2,
      w.rain_mm,
  };
}

long CellCounts::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

CellCounts count_per_cell(std::span<const JoinedRecord> records, const GridSpec& grid) {
  CellCounts out{grid, std::vector<int>(static_cast<std::size_t>(grid.cell_count()), 0)};
  for (const auto& r : records) ++out.counts[grid.flat_index(cell_of(r.accident.location, grid))];
  return out;
}

Dataset build_dataset(std::span<const JoinedRecord> records, const GridSpec& grid) {
  if (!records.empty()) {
    const int year = records.front().accident.timestamp.year;
    for (const auto& r : records) {
      if (r.accident.timestamp.year != year) {
        throw Error(ErrorCode::InvalidArgument, "dataset records span years " + std::to_string(year) +
                                                    " and " + std::to_string(r.accident.timestamp.year));
      }
    }
  }
  const CellCounts counts = count_per_cell(records, grid);
  Dataset data;
  data.grid = grid;
  data.rows.reserve(records.size());
  data.targets.reserve(records.size());
  data.cells.reserve(records.size());
  for (const auto& r : records) {
    const GridCellId cell = cell_of(r.accident.location, grid);
    data.rows.push_back(make_feature_row(r));
    data.targets.push_back(counts.at(cell));
    data.cells.push_back(cell);
  }
  return data;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < kFeatureCount; ++j) out << kFeatureNames[j] << ',';
  out << "target\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.rows[i]) out << csv::format_double(v) << ',';
    out << data.targets[i] << '\n';
  }
}

Dataset read_dataset(std::istream& in, const GridSpec& grid) {
  std::vector<std::string> header(kFeatureNames.begin(), kFeatureNames.end());
  header.emplace_back("target");
  std::string line;
  if (!csv::read_line(in, line) || csv::split(line) != header) {
    throw Error(ErrorCode::MalformedHeader, "dataset header does not match the 13 features + target");
  }
  Dataset data;
  data.grid = grid;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != kFeatureCount + 1) {
      throw Error(ErrorCode::InvalidArgument, "dataset line " + std::to_string(line_no) + ": wrong field count");
    }
    FeatureRow row{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const auto v = csv::parse_double(fields[j]);
      if (!v) throw Error(ErrorCode::InvalidArgument, "dataset line " + std::to_string(line_no) + ": bad number");
      row[j] = *v;
    }
    const auto target = csv::parse_int(fields[kFeatureCount]);
    if (!target || *target < 0) {
      throw Error(ErrorCode::InvalidArgument, "dataset line " + std::to_string(line_no) + ": bad target");
    }
    const GeoPoint location(row[static_cast<std::size_t>(Feature::Latitude)],
                            row[static_cast<std::size_t>(Feature::Longitude)]);
    data.cells.push_back(cell_of(location, grid));
    data.rows.push_back(row);
    data.targets.push_back(static_cast<int>(*target));
  }
  return data;
}

std::size_t feature_index(std::string_view name) {
  const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
  if (it == kFeatureNames.end()) {
    throw Error(ErrorCode::UnknownFeature, "unknown feature '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - kFeatureNames.begin());
}

DesignMatrix to_design(const Dataset& data, std::span<const std::string> drop) {
  std::array<bool, kFeatureCount> keep{};
  keep.fill(true);
  for (const auto& name : drop) keep[feature_index(name)] = false;

  DesignMatrix m;
  std::vector<std::size_t> columns;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (!keep[j]) continue;
    columns.push_back(j);
    m.feature_names.emplace_back(kFeatureNames[j]);
  }
  if (columns.empty()) throw Error(ErrorCode::EmptyFeatureSet, "every feature was dropped");

  m.rows = data.size();
  m.values.reserve(m.rows * columns.size());
  for (const auto& row : data.rows) {
    for (std::size_t j : columns) m.values.push_back(row[j]);
  }
  m.targets.assign(data.targets.begin(), data.targets.end());
  return m;
}

}  // namespace hotspot
