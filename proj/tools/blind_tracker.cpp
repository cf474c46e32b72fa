// blind-tracker: guardian-side client.
//
// Exit codes: 0 ok, 1 usage/other error, 2 server unreachable, 3 no fix.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "eyemate/http.hpp"
#include "eyemate/tracker.hpp"

using namespace eyemate;

namespace {

constexpr int kUnreachable = 2;
constexpr int kNoFix = 3;

void emit(const std::string& path, const nlohmann::ordered_json& doc) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BlindTracker command-line client"};
  app.require_subcommand(1);

  std::string server = "127.0.0.1:8080";
  std::string device;
  std::string out_path;
  std::string fix_path;
  std::size_t limit = 100;
  app.add_option("--server", server, "Server address host:port")->capture_default_str()->envname("EYEMATE_SERVER");

  auto* get = app.add_subcommand("get-location", "Print the latest fix");
  get->add_option("-d,--device", device, "Device id")->required();
  get->add_option("--save", out_path, "Also save the fix line here (input for show-map --fix)");

  auto* show = app.add_subcommand("show-map", "GeoJSON Point + map URL for the latest (or a saved) fix");
  show->add_option("-d,--device", device, "Device id");
  show->add_option("--fix", fix_path, "Saved fix line from get-location --save")->check(CLI::ExistingFile);
  show->add_option("-o,--out", out_path, "GeoJSON output path (stdout if omitted)");

  auto* track = app.add_subcommand("track", "GeoJSON LineString of the traversed path");
  track->add_option("-d,--device", device, "Device id")->required();
  track->add_option("-n,--limit", limit, "Most recent fixes to include")->capture_default_str()->check(
      CLI::PositiveNumber);
  track->add_option("-o,--out", out_path, "GeoJSON output path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    HttpTransport transport(parse_address(server));
    TrackClient client(transport);

    if (*get) {
      auto rec = client.latest(device);
      if (!rec) {
        std::cerr << "no fix for device " << device << "\n";
        return kNoFix;
      }
      const auto line = format_fix_line(rec->fix);
      std::cout << line << "\n";
      if (!out_path.empty()) std::ofstream(out_path) << line << "\n";
      return 0;
    }

    if (*show) {
      LocationFix fix;
      if (!fix_path.empty()) {
        std::ifstream in(fix_path);
        std::string line;
        std::getline(in, line);
        fix = parse_fix_line(line);
      } else {
        if (device.empty()) {
          std::cerr << "show-map needs --device or --fix\n";
          return 1;
        }
        auto rec = client.latest(device);
        if (!rec) {
          std::cerr << "no fix for device " << device << "\n";
          return kNoFix;
        }
        fix = rec->fix;
      }
      const auto view = show_map(fix);
      emit(out_path, view.geojson);
      std::cout << view.url << "\n";
      return 0;
    }

    if (*track) {
      const auto hist = client.history(device, limit);
      if (hist.empty()) {
        std::cerr << "no fixes for device " << device << "\n";
        return kNoFix;
      }
      emit(out_path, track_geojson(hist));
      return 0;
    }
  } catch (const TransportError& e) {
    std::cerr << e.what() << "\n";
    return kUnreachable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
