#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eyemate/track_store.hpp"

namespace eyemate {

/// "device_id=<id> latitude=<6dp> longitude=<6dp> timestamp=<iso> provider=<gps|network>"
std::string format_fix_line(const LocationFix& fix);

/// Parses the line produced by format_fix_line.
LocationFix parse_fix_line(const std::string& line);

struct MapView {
  nlohmann::ordered_json geojson;
  std::string url;
};

/// GeoJSON Point Feature plus a web map link.
MapView show_map(const LocationFix& fix);

/// LineString Feature over the history; a single fix degrades to a Point.
/// Throws std::invalid_argument on an empty history.
nlohmann::ordered_json track_geojson(const std::vector<FixRecord>& history);

/// Structural GeoJSON Feature check; returns the first problem or "".
std::string geojson_problem(const nlohmann::json& feature);

}  // namespace eyemate
