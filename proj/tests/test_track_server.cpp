#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "eyemate/http.hpp"
#include "eyemate/rng.hpp"
#include "eyemate/track_service.hpp"

using namespace eyemate;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("eyemate_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static inline int counter = 0;
};

LocationFix fix(const std::string& device, UtcSeconds t, double lat = 22.9, double lon = 89.5) {
  return {device, lat, lon, t, Provider::Gps};
}

std::string field_of(std::string_view body) {
  try {
    validate_fix(body);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("validate_fix accepts the documented object") {
  const auto f = validate_fix(
      R"({"device_id":"d1","latitude":22.9,"longitude":89.5,"timestamp":"2015-06-01T10:00:00Z","provider":"gps"})");
  CHECK(f.device_id == "d1");
  CHECK(f.latitude == 22.9);
  CHECK(f.longitude == 89.5);
  CHECK(f.timestamp == 1433152800);
  CHECK(f.provider == Provider::Gps);
}

TEST_CASE("validate_fix names the offending field") {
  CHECK(field_of(R"({"device_id":"d1","latitude":91.0,"longitude":89.5,"timestamp":"2015-06-01T10:00:00Z","provider":"gps"})") == "latitude");
  CHECK(field_of(R"({"device_id":"d1","latitude":22.9,"longitude":-180.5,"timestamp":"2015-06-01T10:00:00Z","provider":"gps"})") == "longitude");
  CHECK(field_of(R"({"device_id":"d1","latitude":22.9,"longitude":89.5,"timestamp":"yesterday","provider":"gps"})") == "timestamp");
  CHECK(field_of(R"({"device_id":"d1","latitude":22.9,"longitude":89.5,"timestamp":"2015-02-30T10:00:00Z","provider":"gps"})") == "timestamp");
  CHECK(field_of(R"({"device_id":"d1","latitude":22.9,"longitude":89.5,"timestamp":"2015-06-01T10:00:00Z","provider":"wifi"})") == "provider");
  CHECK(field_of(R"({"latitude":22.9,"longitude":89.5,"timestamp":"2015-06-01T10:00:00Z","provider":"gps"})") == "device_id");
  CHECK(field_of(R"({"device_id":"d1","latitude":"22.9","longitude":89.5,"timestamp":"2015-06-01T10:00:00Z","provider":"gps"})") == "latitude");
  CHECK(field_of(R"({"device_id":"d1","latitude":22.9,"longitude":89.5,"timestamp":"2015-06-01T10:00:00Z","provider":"gps","speed":3})") == "speed");
  CHECK(field_of("not json") == "body");
  CHECK(field_of("[1,2]") == "body");
}

TEST_CASE("TrackStore ids, latest and history") {
  TrackStore store;
  CHECK(store.insert(fix("d1", 100)) == 1);
  CHECK(store.insert(fix("d1", 200)) == 2);
  CHECK(store.latest("d1")->fix.timestamp == 200);
  CHECK_FALSE(store.latest("nobody").has_value());

  // A late-delivered older fix does not become "latest".
  store.insert(fix("d1", 150));
  CHECK(store.latest("d1")->id == 2);

  // Equal timestamps: the later insert wins.
  store.insert(fix("d2", 500, 1.0));
  store.insert(fix("d2", 500, 2.0));
  CHECK(store.latest("d2")->fix.latitude == 2.0);

  const auto all = store.history("d1", 10);
  REQUIRE(all.size() == 3);
  CHECK(all[0].fix.timestamp == 100);
  CHECK(all[1].fix.timestamp == 150);
  CHECK(all[2].fix.timestamp == 200);

  const auto last2 = store.history("d1", 2);
  REQUIRE(last2.size() == 2);
  CHECK(last2[0].fix.timestamp == 150);
  CHECK(last2[1].fix.timestamp == 200);

  CHECK(store.history("nobody", 5).empty());
  CHECK_THROWS(store.history("d1", 0));
}

TEST_CASE("TrackStore reload answers identically") {
  TempDir dir;
  const auto path = dir.path / "fixes.jsonl";
  std::optional<FixRecord> latest_before;
  std::vector<FixRecord> history_before;
  {
    TrackStore store(path);
    Rng rng(17);
    for (int i = 0; i < 50; ++i)
      store.insert(fix(i % 2 ? "a" : "b", 1000 + static_cast<UtcSeconds>(rng.uniform() * 100), rng.uniform() * 10,
                       rng.uniform() * 10));
    latest_before = store.latest("a");
    history_before = store.history("a", 100);
  }
  TrackStore reloaded(path);
  CHECK(reloaded.size() == 50);
  CHECK(reloaded.latest("a") == latest_before);
  CHECK(reloaded.history("a", 100) == history_before);
  CHECK(reloaded.insert(fix("a", 5000)) == 51);
}

TEST_CASE("TrackStore rejects a corrupt log") {
  TempDir dir;
  const auto path = dir.path / "fixes.jsonl";
  std::ofstream(path) << "{\"id\":1,\"device_id\":\"d\",\"latitude\":1,\"longitude\":1}\n";
  CHECK_THROWS_AS(TrackStore{path}, StorageError);
}

TEST_CASE("TrackStore concurrent inserts get unique increasing ids") {
  TempDir dir;
  TrackStore store(dir.path / "fixes.jsonl");
  constexpr int kThreads = 4, kPer = 25;
  std::vector<std::vector<std::int64_t>> ids(kThreads);
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < kPer; ++i) ids[t].push_back(store.insert(fix("dev" + std::to_string(t), i)));
    });
  for (auto& th : threads) th.join();
  std::vector<std::int64_t> all;
  for (auto& v : ids) {
    CHECK(std::is_sorted(v.begin(), v.end()));
    all.insert(all.end(), v.begin(), v.end());
  }
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  CHECK(all.front() == 1);
  CHECK(all.back() == kThreads * kPer);
  TrackStore reloaded(dir.path / "fixes.jsonl");
  CHECK(reloaded.size() == kThreads * kPer);
}

TEST_CASE("TrackService routes and status codes") {
  TrackStore store;
  TrackService svc(store);
  const std::string body =
      R"({"device_id":"d1","latitude":22.9,"longitude":89.5,"timestamp":"2015-06-01T10:00:00Z","provider":"gps"})";

  auto created = svc.handle({"POST", "/api/locations", {}, body});
  CHECK(created.status == 201);
  CHECK(nlohmann::json::parse(created.body)["id"] == 1);

  auto bad = svc.handle({"POST", "/api/locations", {}, R"({"device_id":"d1"})"});
  CHECK(bad.status == 400);
  CHECK(nlohmann::json::parse(bad.body)["field"] == "latitude");

  auto latest = svc.handle({"GET", "/api/locations/latest", {{"device_id", "d1"}}, {}});
  CHECK(latest.status == 200);
  CHECK(nlohmann::json::parse(latest.body)["timestamp"] == "2015-06-01T10:00:00Z");

  CHECK(svc.handle({"GET", "/api/locations/latest", {{"device_id", "zz"}}, {}}).status == 404);
  CHECK(svc.handle({"GET", "/api/locations/latest", {}, {}}).status == 400);

  auto hist = svc.handle({"GET", "/api/locations", {{"device_id", "d1"}, {"limit", "5"}}, {}});
  CHECK(hist.status == 200);
  CHECK(nlohmann::json::parse(hist.body).size() == 1);
  CHECK(svc.handle({"GET", "/api/locations", {{"device_id", "d1"}, {"limit", "0"}}, {}}).status == 400);
  CHECK(svc.handle({"GET", "/api/locations", {{"device_id", "d1"}, {"limit", "x"}}, {}}).status == 400);
  auto unknown = svc.handle({"GET", "/api/locations", {{"device_id", "zz"}}, {}});
  CHECK(unknown.status == 200);
  CHECK(unknown.body == "[]");

  CHECK(svc.handle({"DELETE", "/api/locations", {}, {}}).status == 405);
  CHECK(svc.handle({"GET", "/nope", {}, {}}).status == 404);
}

TEST_CASE("storage failure surfaces as HTTP 500 and the record is not kept") {
  // Appends to /dev/full fail with ENOSPC.
  TrackStore full("/dev/full");
  TrackService full_svc(full);
  const std::string body =
      R"({"device_id":"d1","latitude":1,"longitude":2,"timestamp":"2015-06-01T10:00:00Z","provider":"gps"})";
  const auto r = full_svc.handle({"POST", "/api/locations", {}, body});
  CHECK(r.status == 500);
  CHECK(full.size() == 0);
}

TEST_CASE("TrackClient over loopback and over real HTTP") {
  TrackStore store;
  TrackService svc(store);

  LoopbackTransport loop(svc);
  TrackClient local(loop);
  const auto rec = local.post_fix(fix("d1", 1433152800));
  CHECK(rec.id == 1);
  loop.set_reachable(false);
  CHECK_THROWS_AS(local.latest("d1"), TransportError);

  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread th([&] { server.listen_after_bind(); });

  HttpTransport http({"127.0.0.1", port});
  TrackClient remote(http);
  CHECK(remote.latest("d1") == rec);
  const auto second = remote.post_fix(fix("d1", 1433152900, 22.912345, 89.543211));
  CHECK(second.id == 2);
  CHECK(second.fix.latitude == 22.912345);
  CHECK(remote.history("d1", 10).size() == 2);
  CHECK_FALSE(remote.latest("other").has_value());
  CHECK_THROWS_AS(remote.post_fix(fix("d1", 1, 95.0)), ServiceError);

  server.stop();
  th.join();
  CHECK_THROWS_AS(remote.latest("d1"), TransportError);
}

TEST_CASE("parse_address") {
  CHECK(parse_address("127.0.0.1:9000").port == 9000);
  CHECK(parse_address("http://localhost:81/").host == "localhost");
  CHECK(parse_address("8081").port == 8081);
  CHECK(parse_address("8081").host == "127.0.0.1");
  CHECK_THROWS(parse_address("host:port"));
}
