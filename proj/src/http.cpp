#include "eyemate/http.hpp"

#include <httplib.h>

#include <charconv>
#include <stdexcept>

namespace eyemate {

ServerAddress parse_address(const std::string& text) {
  std::string rest = text;
  if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
  while (!rest.empty() && rest.back() == '/') rest.pop_back();
  ServerAddress addr;
  std::string port_text = rest;
  if (auto colon = rest.rfind(':'); colon != std::string::npos) {
    addr.host = rest.substr(0, colon);
    port_text = rest.substr(colon + 1);
  } else if (rest.find_first_not_of("0123456789") != std::string::npos) {
    addr.host = rest;
    return addr;
  }
  int port = 0;
  auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || p != port_text.data() + port_text.size() || port < 0 || port > 65535)
    throw std::invalid_argument("bad server address '" + text + "'");
  addr.port = port;
  if (addr.host.empty()) addr.host = "127.0.0.1";
  return addr;
}

struct HttpTransport::Impl {
  httplib::Client client;
  Impl(const ServerAddress& a, int timeout_s) : client(a.host, a.port) {
    client.set_connection_timeout(timeout_s, 0);
    client.set_read_timeout(timeout_s, 0);
    client.set_write_timeout(timeout_s, 0);
  }
};

HttpTransport::HttpTransport(ServerAddress address, int timeout_s)
    : impl_(std::make_unique<Impl>(address, timeout_s)) {}

HttpTransport::~HttpTransport() = default;

HttpResponse HttpTransport::send(const HttpRequest& request) {
  httplib::Params params(request.query.begin(), request.query.end());
  httplib::Result res;
  if (request.method == "GET") {
    res = impl_->client.Get(request.path, params, httplib::Headers{});
  } else if (request.method == "POST") {
    res = impl_->client.Post(request.path, request.body, "application/json");
  } else {
    throw std::invalid_argument("unsupported method " + request.method);
  }
  if (!res) throw TransportError("cannot reach server: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

struct HttpServer::Impl {
  TrackService& service;
  httplib::Server server;

  explicit Impl(TrackService& s) : service(s) {
    const auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
      HttpRequest r{req.method, req.path, {}, req.body};
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      const auto out = service.handle(r);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    server.Get("/api/locations/latest", adapt);
    server.Get("/api/locations", adapt);
    server.Post("/api/locations", adapt);
  }
};

HttpServer::HttpServer(TrackService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace eyemate
