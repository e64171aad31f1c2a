#pragma once

#include <compare>
#include <cstddef>

namespace hotspot {

inline constexpr double kEarthRadiusKm = 6371.0;

// Latitude/longitude in degrees. Construction validates range and finiteness.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  GeoPoint() = default;
  GeoPoint(double lat_deg, double lon_deg);

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid_lat_lon(double lat, double lon) noexcept;

struct BoundingBox {
  GeoPoint min;
  GeoPoint max;

  BoundingBox() = default;
  BoundingBox(GeoPoint lo, GeoPoint hi);

  // Closed-interval membership.
  bool contains(const GeoPoint& p) const noexcept;
  double lat_span() const noexcept { return max.lat - min.lat; }
  double lon_span() const noexcept { return max.lon - min.lon; }
  GeoPoint center() const noexcept;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Approximate extent of the Brazilian Federal District.
BoundingBox federal_district_bbox();

struct GridCellId {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const GridCellId&, const GridCellId&) = default;
};

// Uniform rows x cols partition of a bounding box.
struct GridSpec {
  BoundingBox bbox;
  int rows = 1;
  int cols = 1;

  int cell_count() const noexcept { return rows * cols; }
  double lat_step() const noexcept { return bbox.lat_span() / rows; }
  double lon_step() const noexcept { return bbox.lon_span() / cols; }
  std::size_t flat_index(GridCellId id) const noexcept {
    return static_cast<std::size_t>(id.row) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(id.col);
  }
  // Rectangle of a cell; edges computed as min + k*step.
  BoundingBox cell_bounds(GridCellId id) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept;

// Local metric scale: kilometres per degree of latitude and, at latitude
// `lat`, per degree of longitude.
double km_per_deg_lat() noexcept;
double km_per_deg_lon(double lat) noexcept;

// Chooses the factor pair rows*cols == cell_count whose cells (measured in
// km at the box's mid-latitude) are closest to square. Ties go to more cols.
GridSpec make_grid(const BoundingBox& bbox, int cell_count);

// Cell containing p. Points on the max edges clamp into the last row/col.
// Throws OutsideGrid when p lies strictly outside the bbox.
GridCellId cell_of(const GeoPoint& p, const GridSpec& grid);

}  // namespace hotspot
