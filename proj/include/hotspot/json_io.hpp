#pragma once

#include "hotspot/geo.hpp"

#include <json.hpp>

namespace hotspot {

using Json = nlohmann::json;

inline void to_json(Json& j, const GeoPoint& p) { j = Json{{"lat", p.lat}, {"lon", p.lon}}; }
inline void from_json(const Json& j, GeoPoint& p) { p = GeoPoint(j.at("lat").get<double>(), j.at("lon").get<double>()); }

inline void to_json(Json& j, const BoundingBox& b) { j = Json{{"min", b.min}, {"max", b.max}}; }
inline void from_json(const Json& j, BoundingBox& b) {
  b = BoundingBox(j.at("min").get<GeoPoint>(), j.at("max").get<GeoPoint>());
}

inline void to_json(Json& j, const GridSpec& g) {
  j = Json{{"bbox", g.bbox}, {"rows", g.rows}, {"cols", g.cols}};
}
inline void from_json(const Json& j, GridSpec& g) {
  g.bbox = j.at("bbox").get<BoundingBox>();
  g.rows = j.at("rows").get<int>();
  g.cols = j.at("cols").get<int>();
}

// Canonical text form: sorted keys (nlohmann objects are ordered maps), two-space indent.
inline std::string canonical(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace hotspot
