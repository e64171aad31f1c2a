#include "hotspot/error.hpp"
#include "hotspot/geo.hpp"
#include "hotspot/random.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

using namespace hotspot;

namespace {

// Spherical law of cosines, used as an independent great-circle formula.
double law_of_cosines_km(const GeoPoint& a, const GeoPoint& b) {
  const double k = std::numbers::pi / 180.0;
  const double c = std::sin(a.lat * k) * std::sin(b.lat * k) +
                   std::cos(a.lat * k) * std::cos(b.lat * k) * std::cos((b.lon - a.lon) * k);
  return 6371.0 * std::acos(std::min(1.0, std::max(-1.0, c)));
}

GeoPoint random_point(rng::Engine& eng, const BoundingBox& box) {
  return GeoPoint(rng::uniform(eng, box.min.lat, box.max.lat), rng::uniform(eng, box.min.lon, box.max.lon));
}

// Scan every cell rectangle; max edges only belong to the last row/col.
std::vector<GridCellId> rectangle_scan(const GeoPoint& p, const GridSpec& g) {
  std::vector<GridCellId> hits;
  const double lat_step = (g.bbox.max.lat - g.bbox.min.lat) / g.rows;
  const double lon_step = (g.bbox.max.lon - g.bbox.min.lon) / g.cols;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const double lat_lo = g.bbox.min.lat + r * lat_step;
      const double lon_lo = g.bbox.min.lon + c * lon_step;
      const double lat_hi = r + 1 == g.rows ? g.bbox.max.lat : g.bbox.min.lat + (r + 1) * lat_step;
      const double lon_hi = c + 1 == g.cols ? g.bbox.max.lon : g.bbox.min.lon + (c + 1) * lon_step;
      const bool in_lat = p.lat >= lat_lo && (p.lat < lat_hi || (r + 1 == g.rows && p.lat <= lat_hi));
      const bool in_lon = p.lon >= lon_lo && (p.lon < lon_hi || (c + 1 == g.cols && p.lon <= lon_hi));
      if (in_lat && in_lon) hits.push_back({r, c});
    }
  }
  return hits;
}

}  // namespace

TEST_CASE("GeoPoint and BoundingBox validate their fields") {
  CHECK_NOTHROW(GeoPoint(-90.0, 180.0));
  CHECK_THROWS_AS(GeoPoint(90.5, 0.0), Error);
  CHECK_THROWS_AS(GeoPoint(0.0, -180.01), Error);
  CHECK_THROWS_AS(GeoPoint(std::numeric_limits<double>::quiet_NaN(), 0.0), Error);
  CHECK_THROWS_AS(GeoPoint(0.0, std::numeric_limits<double>::infinity()), Error);
  CHECK_THROWS_AS(BoundingBox(GeoPoint(1, 1), GeoPoint(1, 2)), Error);
  CHECK_THROWS_AS(BoundingBox(GeoPoint(1, 2), GeoPoint(2, 1)), Error);
}

TEST_CASE("haversine: identity and known values") {
  const GeoPoint a(-15.79, -47.88);
  CHECK(haversine_km(a, a) == 0.0);
  // 40-digit reference values.
  CHECK(haversine_km(a, GeoPoint(-15.79, -47.93)) == doctest::Approx(5.349952075807838).epsilon(1e-13));
  CHECK(haversine_km(GeoPoint(0, 0), GeoPoint(0, 1)) == doctest::Approx(111.19492664455874).epsilon(1e-13));
  CHECK(haversine_km(GeoPoint(-15.789, -47.926), GeoPoint(-15.599, -48.131)) ==
        doctest::Approx(30.462130003562656).epsilon(1e-13));
}

TEST_CASE("haversine agrees with the law of cosines") {
  const GeoPoint a(-15.79, -47.88);
  const GeoPoint b(-15.79, -47.93);
  CHECK(std::abs(haversine_km(a, b) - law_of_cosines_km(a, b)) < 1e-6);

  rng::Engine eng = rng::make_engine(7);
  const BoundingBox world(GeoPoint(-80, -179), GeoPoint(80, 179));
  for (int i = 0; i < 200; ++i) {
    const GeoPoint p = random_point(eng, world);
    const GeoPoint q = random_point(eng, world);
    // acos loses precision for tiny angles; these pairs are far apart.
    CHECK(std::abs(haversine_km(p, q) - law_of_cosines_km(p, q)) < 1e-6);
  }
}

TEST_CASE("haversine is symmetric, non-negative and obeys the triangle inequality") {
  rng::Engine eng = rng::make_engine(11);
  const BoundingBox world(GeoPoint(-89, -179), GeoPoint(89, 179));
  for (int i = 0; i < 100; ++i) {
    const GeoPoint a = random_point(eng, world);
    const GeoPoint b = random_point(eng, world);
    const GeoPoint c = random_point(eng, world);
    CHECK(haversine_km(a, b) == haversine_km(b, a));
    CHECK(haversine_km(a, b) >= 0.0);
    CHECK(haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-9);
  }
}

TEST_CASE("make_grid picks the most square factor pair") {
  const BoundingBox fd = federal_district_bbox();
  const double height = fd.lat_span() * 6371.0 * std::numbers::pi / 180.0;
  CHECK(height == doctest::Approx(66.7169559867354).epsilon(1e-12));

  SUBCASE("brute force over factor pairs") {
    for (int n : {1, 2, 6, 7, 12, 20, 36, 80, 81, 100, 320}) {
      const double width = fd.lon_span() * 6371.0 * std::numbers::pi / 180.0 *
                           std::cos((fd.min.lat + fd.max.lat) / 2 * std::numbers::pi / 180.0);
      int best_r = 0;
      double best = 1e300;
      for (int r = 1; r <= n; ++r) {
        if (n % r) continue;
        const double s = std::abs(std::log((height / r) / (width / (n / r))));
        if (s < best - 1e-12) {
          best = s;
          best_r = r;
        }
      }
      const GridSpec g = make_grid(fd, n);
      CHECK(g.rows == best_r);
      CHECK(g.rows * g.cols == n);
    }
  }

  SUBCASE("pinned shapes") {
    CHECK(make_grid(fd, 80).rows == 8);
    CHECK(make_grid(fd, 80).cols == 10);
    CHECK(make_grid(fd, 20).rows == 4);
    CHECK(make_grid(fd, 320).rows == 16);
    CHECK(make_grid(fd, 1).cell_count() == 1);
    const GridSpec seven = make_grid(fd, 7);
    CHECK(seven.rows == 1);
    CHECK(seven.cols == 7);
  }

  SUBCASE("one cell is the whole box") {
    const GridSpec g = make_grid(fd, 1);
    CHECK(g.cell_bounds({0, 0}) == fd);
  }

  SUBCASE("ties go to more columns") {
    // Square in km (mid-latitude 0): 1x2 and 2x1 score ln 2 each.
    const GridSpec g = make_grid(BoundingBox(GeoPoint(-0.5, 0), GeoPoint(0.5, 1)), 2);
    CHECK(g.rows == 1);
    CHECK(g.cols == 2);
  }

  CHECK_THROWS_AS(make_grid(fd, 0), Error);
}

TEST_CASE("cell_of: corners and outside points") {
  const GridSpec g = make_grid(federal_district_bbox(), 80);
  CHECK(cell_of(g.bbox.min, g) == GridCellId{0, 0});
  CHECK(cell_of(g.bbox.max, g) == GridCellId{g.rows - 1, g.cols - 1});
  CHECK(cell_of(GeoPoint(g.bbox.max.lat, g.bbox.min.lon), g) == GridCellId{g.rows - 1, 0});
  try {
    cell_of(GeoPoint(-15.0, -47.5), g);
    FAIL("expected OutsideGrid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutsideGrid);
  }
}

TEST_CASE("cell_of matches a rectangle scan on 1000 random points") {
  rng::Engine eng = rng::make_engine(3);
  for (int n : {1, 7, 20, 80, 320}) {
    const GridSpec g = make_grid(federal_district_bbox(), n);
    for (int i = 0; i < 1000; ++i) {
      const GeoPoint p = random_point(eng, g.bbox);
      const auto hits = rectangle_scan(p, g);
      REQUIRE(hits.size() == 1);  // partition: exactly one cell
      CHECK(cell_of(p, g) == hits.front());
    }
  }
}

TEST_CASE("cell rectangles tile the box") {
  const GridSpec g = make_grid(federal_district_bbox(), 80);
  double area = 0.0;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const BoundingBox b = g.cell_bounds({r, c});
      area += b.lat_span() * b.lon_span();
      if (c + 1 < g.cols) CHECK(b.max.lon == g.cell_bounds({r, c + 1}).min.lon);
      if (r + 1 < g.rows) CHECK(b.max.lat == g.cell_bounds({r + 1, c}).min.lat);
    }
  }
  CHECK(area == doctest::Approx(g.bbox.lat_span() * g.bbox.lon_span()).epsilon(1e-12));
  CHECK(g.cell_bounds({g.rows - 1, g.cols - 1}).max == g.bbox.max);
}
