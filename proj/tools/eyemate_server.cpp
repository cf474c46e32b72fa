// eyemate-server: HTTP/JSON location store.
//
// Flags --listen/--store; EYEMATE_LISTEN and EYEMATE_STORE override them.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "eyemate/http.hpp"

using namespace eyemate;

int main(int argc, char** argv) {
  CLI::App app{"EyeMate location server"};
  std::string listen = "127.0.0.1:8080";
  std::string store_path = "eyemate_fixes.jsonl";
  app.add_option("-l,--listen", listen, "host:port (port 0 picks a free port)")->capture_default_str();
  app.add_option("-s,--store", store_path, "Append-only fix log")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("EYEMATE_LISTEN"); env && *env) listen = env;
  if (const char* env = std::getenv("EYEMATE_STORE"); env && *env) store_path = env;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    const auto address = parse_address(listen);
    TrackStore store(store_path);
    TrackService service(store);
    HttpServer server(service);
    const int port = server.bind(address.host, address.port);
    if (port < 0) {
      std::cerr << "cannot bind " << listen << "\n";
      return 1;
    }
    std::cout << "listening on " << address.host << ":" << port << " store=" << store_path << " records="
              << store.size() << std::endl;

    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      server.stop();
    });
    server.listen_after_bind();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
