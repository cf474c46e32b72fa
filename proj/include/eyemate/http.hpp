#pragma once

#include <memory>
#include <string>

#include "eyemate/track_service.hpp"

namespace eyemate {

struct ServerAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// Accepts "host:port", "http://host:port" or a bare port.
ServerAddress parse_address(const std::string& text);

class HttpTransport : public Transport {
 public:
  explicit HttpTransport(ServerAddress address, int timeout_s = 5);
  ~HttpTransport() override;
  HttpResponse send(const HttpRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Serves a TrackService over HTTP/1.1. Handlers run on the server's worker
/// threads; the store serializes writers.
class HttpServer {
 public:
  explicit HttpServer(TrackService& service);
  ~HttpServer();

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace eyemate
