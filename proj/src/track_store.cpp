#include "eyemate/track_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include "eyemate/time_util.hpp"

namespace eyemate {

nlohmann::ordered_json to_json(const LocationFix& fix) {
  return {{"device_id", fix.device_id},
          {"latitude", round_coordinate(fix.latitude)},
          {"longitude", round_coordinate(fix.longitude)},
          {"timestamp", format_utc(fix.timestamp)},
          {"provider", std::string(to_string(fix.provider))}};
}

nlohmann::ordered_json to_json(const FixRecord& record) {
  nlohmann::ordered_json j{{"id", record.id}};
  const auto fields = to_json(record.fix);
  for (const auto& [k, v] : fields.items()) j[k] = v;
  return j;
}

FixRecord record_from_json(const nlohmann::json& j) {
  FixRecord r;
  r.id = j.at("id").get<std::int64_t>();
  r.fix = validate_fix(j.dump());
  return r;
}

LocationFix validate_fix(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("body", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("body", "expected a JSON object");

  static const char* const kFields[] = {"device_id", "latitude", "longitude", "timestamp", "provider"};
  for (const auto& [key, _] : j.items()) {
    if (key == "id") continue;
    if (std::find_if(std::begin(kFields), std::end(kFields), [&](const char* f) { return key == f; }) ==
        std::end(kFields))
      throw ValidationError(key, "unknown field");
  }
  for (const char* f : kFields)
    if (!j.contains(f)) throw ValidationError(f, "missing");

  LocationFix fix;
  const auto& dev = j["device_id"];
  if (!dev.is_string() || dev.get_ref<const std::string&>().empty())
    throw ValidationError("device_id", "must be a non-empty string");
  fix.device_id = dev.get<std::string>();

  const auto coordinate = [&](const char* name, double bound) {
    const auto& v = j[name];
    if (!v.is_number()) throw ValidationError(name, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d) || d < -bound || d > bound)
      throw ValidationError(name, "out of range [-" + std::to_string(static_cast<int>(bound)) + ", " +
                                      std::to_string(static_cast<int>(bound)) + "]");
    return round_coordinate(d);
  };
  fix.latitude = coordinate("latitude", 90.0);
  fix.longitude = coordinate("longitude", 180.0);

  const auto& ts = j["timestamp"];
  std::optional<UtcSeconds> parsed;
  if (ts.is_string()) parsed = parse_utc(ts.get<std::string>());
  if (!parsed) throw ValidationError("timestamp", "expected ISO-8601 UTC like 2015-06-01T10:00:00Z");
  fix.timestamp = *parsed;

  const auto& prov = j["provider"];
  if (!prov.is_string() || (prov != "gps" && prov != "network"))
    throw ValidationError("provider", "must be \"gps\" or \"network\"");
  fix.provider = provider_from_string(prov.get<std::string>());
  return fix;
}

TrackStore::TrackStore(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::is_regular_file(*path_)) {
    std::ifstream in(*path_);
    if (!in) throw StorageError("cannot read " + path_->string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      FixRecord r;
      try {
        r = record_from_json(nlohmann::json::parse(line));
      } catch (const std::exception& e) {
        throw StorageError(path_->string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      if (!records_.empty() && r.id <= records_.back().id)
        throw StorageError(path_->string() + ":" + std::to_string(lineno) + ": ids not increasing");
      by_device_[r.fix.device_id].push_back(records_.size());
      records_.push_back(std::move(r));
    }
  }
  fd_ = ::open(path_->c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw StorageError("cannot open " + path_->string() + ": " + std::strerror(errno));
}

TrackStore::~TrackStore() {
  if (fd_ >= 0) ::close(fd_);
}

std::int64_t TrackStore::insert(const LocationFix& fix) {
  std::unique_lock lock(mutex_);
  FixRecord r{records_.empty() ? 1 : records_.back().id + 1, fix};
  r.fix.latitude = round_coordinate(r.fix.latitude);
  r.fix.longitude = round_coordinate(r.fix.longitude);
  if (fd_ >= 0) {
    const std::string line = to_json(r).dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
      const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw StorageError(std::string("append failed: ") + std::strerror(errno));
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fdatasync(fd_) != 0) throw StorageError(std::string("sync failed: ") + std::strerror(errno));
  }
  by_device_[r.fix.device_id].push_back(records_.size());
  records_.push_back(std::move(r));
  return records_.back().id;
}

std::optional<FixRecord> TrackStore::latest(const std::string& device_id) const {
  std::shared_lock lock(mutex_);
  auto it = by_device_.find(device_id);
  if (it == by_device_.end()) return std::nullopt;
  const FixRecord* best = nullptr;
  for (std::size_t i : it->second) {
    const auto& r = records_[i];
    if (!best || r.fix.timestamp > best->fix.timestamp ||
        (r.fix.timestamp == best->fix.timestamp && r.id > best->id))
      best = &r;
  }
  return *best;
}

std::vector<FixRecord> TrackStore::history(const std::string& device_id, std::size_t limit) const {
  if (limit == 0) throw std::invalid_argument("history: limit must be >= 1");
  std::vector<FixRecord> out;
  {
    std::shared_lock lock(mutex_);
    auto it = by_device_.find(device_id);
    if (it == by_device_.end()) return out;
    for (std::size_t i : it->second) out.push_back(records_[i]);
  }
  std::sort(out.begin(), out.end(), [](const FixRecord& a, const FixRecord& b) {
    return std::tie(a.fix.timestamp, a.id) < std::tie(b.fix.timestamp, b.id);
  });
  if (out.size() > limit) out.erase(out.begin(), out.end() - static_cast<std::ptrdiff_t>(limit));
  return out;
}

std::size_t TrackStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

}  // namespace eyemate
