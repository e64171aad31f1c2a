#pragma once

#include "hotspot/fuse.hpp"
#include "hotspot/geo.hpp"

#include <array>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hotspot {

// Model input columns, in contract order.
enum class Feature : std::size_t {
  Longitude,
  Latitude,
  SpeedLimit,
  Year,
  Month,
  Workday,
  Hour,
  Temperature,
  Humidity,
  Pressure,
  Wind,
  SolarRadiation,
  Rain,
};

inline constexpr std::size_t kFeatureCount = 13;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "longitude", "latitude", "speed_limit", "year",     "month", "workday",         "hour",
    "temperature", "humidity", "pressure",  "wind", "solar_radiation", "rain"};

using FeatureRow = std::array<double, kFeatureCount>;

FeatureRow make_feature_row(const JoinedRecord& record);

struct CellCounts {
  GridSpec grid;
  std::vector<int> counts;  // row-major, rows*cols

  int at(GridCellId id) const { return counts.at(grid.flat_index(id)); }
  long total() const;
};

CellCounts count_per_cell(std::span<const JoinedRecord> records, const GridSpec& grid);

// One row per accident of a single year; target = that year's count in the
// accident's cell.
struct Dataset {
  GridSpec grid;
  std::vector<FeatureRow> rows;
  std::vector<int> targets;
  std::vector<GridCellId> cells;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
};

// Throws InvalidArgument when the records span more than one calendar year.
Dataset build_dataset(std::span<const JoinedRecord> records, const GridSpec& grid);

// Flat export: the 13 feature names plus "target".
void write_dataset(std::ostream& out, const Dataset& data);
// Reads a write_dataset file; cells are recomputed against `grid`.
Dataset read_dataset(std::istream& in, const GridSpec& grid);

// Dense row-major matrix over a subset of the features, used by the models.
struct DesignMatrix {
  std::vector<std::string> feature_names;
  std::size_t rows = 0;
  std::vector<double> values;
  std::vector<double> targets;

  std::size_t cols() const noexcept { return feature_names.size(); }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols(), cols()};
  }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
};

// Drops the named columns. Throws UnknownFeature for a name outside the 13
// canonical ones, EmptyFeatureSet when nothing would remain.
DesignMatrix to_design(const Dataset& data, std::span<const std::string> drop = {});

std::size_t feature_index(std::string_view name);  // throws UnknownFeature

}  // namespace hotspot
