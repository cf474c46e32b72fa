#include "eyemate/tracker.hpp"

#include <sstream>
#include <stdexcept>

#include "eyemate/time_util.hpp"

namespace eyemate {

std::string format_fix_line(const LocationFix& fix) {
  return "device_id=" + fix.device_id + " latitude=" + format_coordinate(fix.latitude) +
         " longitude=" + format_coordinate(fix.longitude) + " timestamp=" + format_utc(fix.timestamp) +
         " provider=" + std::string(to_string(fix.provider));
}

LocationFix parse_fix_line(const std::string& line) {
  std::istringstream in(line);
  nlohmann::json j = nlohmann::json::object();
  for (std::string field; in >> field;) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad fix line field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "latitude" || key == "longitude")
      j[key] = std::stod(value);
    else
      j[key] = value;
  }
  return validate_fix(j.dump());
}

namespace {

nlohmann::ordered_json fix_properties(const LocationFix& fix) {
  return {{"device_id", fix.device_id},
          {"timestamp", format_utc(fix.timestamp)},
          {"provider", std::string(to_string(fix.provider))}};
}

nlohmann::ordered_json position(const LocationFix& fix) {
  return nlohmann::ordered_json::array({round_coordinate(fix.longitude), round_coordinate(fix.latitude)});
}

}  // namespace

MapView show_map(const LocationFix& fix) {
  MapView view;
  view.geojson = {{"type", "Feature"},
                  {"geometry", {{"type", "Point"}, {"coordinates", position(fix)}}},
                  {"properties", fix_properties(fix)}};
  view.url = "https://www.google.com/maps?q=" + format_coordinate_short(fix.latitude) + "," +
             format_coordinate_short(fix.longitude);
  return view;
}

nlohmann::ordered_json track_geojson(const std::vector<FixRecord>& history) {
  if (history.empty()) throw std::invalid_argument("track: empty history");
  if (history.size() == 1) return show_map(history.front().fix).geojson;

  auto coords = nlohmann::ordered_json::array();
  auto times = nlohmann::ordered_json::array();
  for (const auto& r : history) {
    coords.push_back(position(r.fix));
    times.push_back(format_utc(r.fix.timestamp));
  }
  return {{"type", "Feature"},
          {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
          {"properties",
           {{"device_id", history.front().fix.device_id},
            {"start", times.front()},
            {"end", times.back()},
            {"timestamps", times}}}};
}

std::string geojson_problem(const nlohmann::json& f) {
  const auto is_position = [](const nlohmann::json& p) {
    if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number()) return false;
    const double lon = p[0].get<double>();
    const double lat = p[1].get<double>();
    return lon >= -180.0 && lon <= 180.0 && lat >= -90.0 && lat <= 90.0;
  };
  if (!f.is_object() || f.value("type", "") != "Feature") return "type must be \"Feature\"";
  if (!f.contains("properties") || !(f["properties"].is_object() || f["properties"].is_null()))
    return "properties must be an object or null";
  if (!f.contains("geometry") || !f["geometry"].is_object()) return "geometry missing";
  const auto& g = f["geometry"];
  if (!g.contains("coordinates")) return "geometry.coordinates missing";
  const auto& c = g["coordinates"];
  const std::string type = g.value("type", "");
  if (type == "Point") return is_position(c) ? "" : "Point needs one [lon, lat] position";
  if (type == "LineString") {
    if (!c.is_array() || c.size() < 2) return "LineString needs at least two positions";
    for (const auto& p : c)
      if (!is_position(p)) return "LineString has an invalid [lon, lat] position";
    return "";
  }
  return "unsupported geometry type '" + type + "'";
}

}  // namespace eyemate
