#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eyemate/location.hpp"

namespace eyemate {

struct FixRecord {
  std::int64_t id = 0;
  LocationFix fix;
  bool operator==(const FixRecord&) const = default;
};

nlohmann::ordered_json to_json(const LocationFix& fix);
nlohmann::ordered_json to_json(const FixRecord& record);
FixRecord record_from_json(const nlohmann::json& j);

class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and checks an upload body. Throws ValidationError naming the
/// offending field. Unknown fields are rejected; "id" is ignored.
LocationFix validate_fix(std::string_view body);

/// Append-only fix log. With a path, every insert is written as one JSON line
/// and synced before insert() returns; construction replays the file.
class TrackStore {
 public:
  TrackStore() = default;
  explicit TrackStore(std::filesystem::path path);
  ~TrackStore();

  TrackStore(const TrackStore&) = delete;
  TrackStore& operator=(const TrackStore&) = delete;

  std::int64_t insert(const LocationFix& fix);

  /// Maximum timestamp, ties to the highest id.
  std::optional<FixRecord> latest(const std::string& device_id) const;

  /// Ascending (timestamp, id), truncated to the most recent `limit`.
  std::vector<FixRecord> history(const std::string& device_id, std::size_t limit) const;

  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::vector<FixRecord> records_;
  std::map<std::string, std::vector<std::size_t>> by_device_;
  std::optional<std::filesystem::path> path_;
  int fd_ = -1;
};

}  // namespace eyemate
