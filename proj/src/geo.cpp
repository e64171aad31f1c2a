#include "hotspot/geo.hpp"
#include "hotspot/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hotspot {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string describe(double lat, double lon) {
  return "(" + std::to_string(lat) + ", " + std::to_string(lon) + ")";
}

}  // namespace

bool is_valid_lat_lon(double lat, double lon) noexcept {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
         lon >= -180.0 && lon <= 180.0;
}

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat(lat_deg), lon(lon_deg) {
  if (!is_valid_lat_lon(lat_deg, lon_deg)) {
    throw Error(ErrorCode::InvalidArgument, "invalid coordinate " + describe(lat_deg, lon_deg));
  }
}

BoundingBox::BoundingBox(GeoPoint lo, GeoPoint hi) : min(lo), max(hi) {
  if (!(lo.lat < hi.lat) || !(lo.lon < hi.lon)) {
    throw Error(ErrorCode::InvalidArgument,
                "bounding box min " + describe(lo.lat, lo.lon) + " is not below max " +
                    describe(hi.lat, hi.lon));
  }
}

bool BoundingBox::contains(const GeoPoint& p) const noexcept {
  return p.lat >= min.lat && p.lat <= max.lat && p.lon >= min.lon && p.lon <= max.lon;
}

GeoPoint BoundingBox::center() const noexcept {
  GeoPoint c;
  c.lat = 0.5 * (min.lat + max.lat);
  c.lon = 0.5 * (min.lon + max.lon);
  return c;
}

BoundingBox federal_district_bbox() {
  return BoundingBox(GeoPoint(-16.05, -48.30), GeoPoint(-15.45, -47.30));
}

BoundingBox GridSpec::cell_bounds(GridCellId id) const {
  const double lat_lo = bbox.min.lat + id.row * lat_step();
  const double lon_lo = bbox.min.lon + id.col * lon_step();
  const double lat_hi = id.row + 1 == rows ? bbox.max.lat : bbox.min.lat + (id.row + 1) * lat_step();
  const double lon_hi = id.col + 1 == cols ? bbox.max.lon : bbox.min.lon + (id.col + 1) * lon_step();
  return BoundingBox(GeoPoint(lat_lo, lon_lo), GeoPoint(lat_hi, lon_hi));
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double km_per_deg_lat() noexcept { return kEarthRadiusKm * kDegToRad; }

double km_per_deg_lon(double lat) noexcept { return km_per_deg_lat() * std::cos(lat * kDegToRad); }

GridSpec make_grid(const BoundingBox& bbox, int cell_count) {
  if (cell_count < 1) {
    throw Error(ErrorCode::InvalidArgument, "cell_count must be >= 1, got " + std::to_string(cell_count));
  }
  const double height_km = bbox.lat_span() * km_per_deg_lat();
  const double width_km = bbox.lon_span() * km_per_deg_lon(bbox.center().lat);

  GridSpec best{bbox, 1, cell_count};
  double best_score = std::numeric_limits<double>::infinity();
  for (int rows = 1; rows <= cell_count; ++rows) {
    if (cell_count % rows != 0) continue;
    const int cols = cell_count / rows;
    const double score = std::abs(std::log((height_km / rows) / (width_km / cols)));
    // Rows ascend, so cols descend: an equal score only replaces when
    // strictly better, which keeps the pair with more cols.
    if (score < best_score - 1e-12) {
      best_score = score;
      best = GridSpec{bbox, rows, cols};
    }
  }
  return best;
}

GridCellId cell_of(const GeoPoint& p, const GridSpec& grid) {
  if (!grid.bbox.contains(p)) {
    throw Error(ErrorCode::OutsideGrid, "point " + describe(p.lat, p.lon) + " lies outside the grid");
  }
  const auto index = [](double offset, double step, int n) {
    const int k = static_cast<int>(std::floor(offset / step));
    return std::clamp(k, 0, n - 1);
  };
  return GridCellId{index(p.lat - grid.bbox.min.lat, grid.lat_step(), grid.rows),
                    index(p.lon - grid.bbox.min.lon, grid.lon_step(), grid.cols)};
}

}  // namespace hotspot
