#include "eyemate/track_service.hpp"

#include <charconv>

namespace eyemate {

namespace {

HttpResponse json_response(int status, const nlohmann::ordered_json& body) { return {status, body.dump()}; }

HttpResponse error_response(int status, const std::string& message, const std::string& field = {}) {
  nlohmann::ordered_json body{{"error", message}};
  if (!field.empty()) body["field"] = field;
  return json_response(status, body);
}

std::optional<std::string> query_param(const HttpRequest& req, const std::string& key) {
  auto it = req.query.find(key);
  if (it == req.query.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

}  // namespace

HttpResponse TrackService::handle(const HttpRequest& req) {
  if (req.path == "/api/locations" && req.method == "POST") {
    LocationFix fix;
    try {
      fix = validate_fix(req.body);
    } catch (const ValidationError& e) {
      return error_response(400, e.what(), e.field());
    }
    try {
      const auto id = store_.insert(fix);
      return json_response(201, to_json(FixRecord{id, fix}));
    } catch (const StorageError& e) {
      return error_response(500, e.what());
    }
  }

  if (req.path == "/api/locations/latest" && req.method == "GET") {
    auto device = query_param(req, "device_id");
    if (!device) return error_response(400, "device_id: missing", "device_id");
    auto rec = store_.latest(*device);
    if (!rec) return error_response(404, "no fix for device " + *device);
    return json_response(200, to_json(*rec));
  }

  if (req.path == "/api/locations" && req.method == "GET") {
    auto device = query_param(req, "device_id");
    if (!device) return error_response(400, "device_id: missing", "device_id");
    std::size_t limit = kDefaultHistoryLimit;
    if (auto text = query_param(req, "limit")) {
      long long v = 0;
      auto [p, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
      if (ec != std::errc{} || p != text->data() + text->size() || v < 1)
        return error_response(400, "limit: must be an integer >= 1", "limit");
      limit = static_cast<std::size_t>(v);
    }
    auto body = nlohmann::ordered_json::array();
    for (const auto& r : store_.history(*device, limit)) body.push_back(to_json(r));
    return json_response(200, body);
  }

  if (req.path == "/api/locations" || req.path == "/api/locations/latest")
    return error_response(405, "method not allowed");
  return error_response(404, "no route for " + req.path);
}

HttpResponse LoopbackTransport::send(const HttpRequest& request) {
  if (!reachable_) throw TransportError("loopback: server unreachable");
  return service_.handle(request);
}

FixRecord TrackClient::post_fix(const LocationFix& fix) {
  auto resp = transport_.send({"POST", "/api/locations", {}, to_json(fix).dump()});
  if (resp.status != 201) throw ServiceError(resp.status, resp.body);
  return record_from_json(nlohmann::json::parse(resp.body));
}

std::optional<FixRecord> TrackClient::latest(const std::string& device_id) {
  auto resp = transport_.send({"GET", "/api/locations/latest", {{"device_id", device_id}}, {}});
  if (resp.status == 404) return std::nullopt;
  if (resp.status != 200) throw ServiceError(resp.status, resp.body);
  return record_from_json(nlohmann::json::parse(resp.body));
}

std::vector<FixRecord> TrackClient::history(const std::string& device_id, std::size_t limit) {
  auto resp = transport_.send(
      {"GET", "/api/locations", {{"device_id", device_id}, {"limit", std::to_string(limit)}}, {}});
  if (resp.status != 200) throw ServiceError(resp.status, resp.body);
  std::vector<FixRecord> out;
  for (const auto& j : nlohmann::json::parse(resp.body)) out.push_back(record_from_json(j));
  return out;
}

}  // namespace eyemate
