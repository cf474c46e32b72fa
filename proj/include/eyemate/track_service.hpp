#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eyemate/track_store.hpp"

namespace eyemate {

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Routes:
///   POST /api/locations                          -> 201 record | 400 | 500
///   GET  /api/locations/latest?device_id=D       -> 200 record | 404
///   GET  /api/locations?device_id=D&limit=N      -> 200 [records]
class TrackService {
 public:
  static constexpr std::size_t kDefaultHistoryLimit = 100;

  explicit TrackService(TrackStore& store) : store_(store) {}
  HttpResponse handle(const HttpRequest& request);

 private:
  TrackStore& store_;
};

/// Raised when the server cannot be reached at all.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// Calls the service directly; `reachable` lets a simulation take it offline.
class LoopbackTransport : public Transport {
 public:
  explicit LoopbackTransport(TrackService& service) : service_(service) {}
  HttpResponse send(const HttpRequest& request) override;
  void set_reachable(bool reachable) { reachable_ = reachable; }

 private:
  TrackService& service_;
  bool reachable_ = true;
};

/// Error status from the service that the caller did not expect.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& body)
      : std::runtime_error("server returned " + std::to_string(status) + ": " + body), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class TrackClient {
 public:
  explicit TrackClient(Transport& transport) : transport_(transport) {}

  FixRecord post_fix(const LocationFix& fix);
  std::optional<FixRecord> latest(const std::string& device_id);
  std::vector<FixRecord> history(const std::string& device_id, std::size_t limit);

 private:
  Transport& transport_;
};

}  // namespace eyemate
