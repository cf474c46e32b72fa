#include "eyemate/world_sim.hpp"

#include <cmath>
#include <string>

namespace eyemate {

namespace {

template <typename T, typename Check>
void check_timeline(const Timeline<T>& tl, const std::string& name, VirtualMs duration,
                    std::vector<std::string>& problems, Check&& check_value) {
  const auto& segs = tl.segments();
  if (segs.empty()) {
    problems.push_back(name + ": timeline is empty");
    return;
  }
  if (segs.front().start != 0) problems.push_back(name + ": first segment must start at 0");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i > 0 && segs[i].start <= segs[i - 1].start)
      problems.push_back(name + "[" + std::to_string(i) + "]: segment starts must strictly increase");
    if (segs[i].start > duration)
      problems.push_back(name + "[" + std::to_string(i) + "]: segment starts after duration_ms");
    check_value(segs[i].value, name + "[" + std::to_string(i) + "]");
  }
}

}  // namespace

std::vector<std::string> validate_script(const ScenarioScript& script) {
  std::vector<std::string> problems;
  if (script.duration_ms <= 0) problems.push_back("duration_ms: must be positive");
  const auto no_check = [](const auto&, const std::string&) {};

  for (const auto& [channel, track] : script.channel_tracks) {
    check_timeline(track, "channels." + std::string(to_string(channel)), script.duration_ms, problems,
                   [&](const std::optional<double>& cm, const std::string& where) {
                     if (cm && !(*cm > 0.0 && *cm <= 1000.0))
                       problems.push_back(where + ": true distance must be in (0, 1000] cm");
                   });
  }
  check_timeline(script.surface, "surface", script.duration_ms, problems, no_check);
  check_timeline(script.weather, "weather", script.duration_ms, problems, no_check);
  check_timeline(script.gps_available, "gps_available", script.duration_ms, problems, no_check);
  check_timeline(script.network_available, "network_available", script.duration_ms, problems, no_check);
  check_timeline(script.server_reachable, "server_reachable", script.duration_ms, problems, no_check);

  const auto& path = script.geo_path;
  if (path.empty()) {
    problems.push_back("geo_path: needs at least one waypoint");
  } else if (path.front().t != 0) {
    problems.push_back("geo_path: first waypoint must be at t=0");
  }
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::string where = "geo_path[" + std::to_string(i) + "]";
    if (i > 0 && path[i].t <= path[i - 1].t) problems.push_back(where + ": times must strictly increase");
    if (!(path[i].position.latitude >= -90.0 && path[i].position.latitude <= 90.0))
      problems.push_back(where + ".lat: must be in [-90, 90]");
    if (!(path[i].position.longitude >= -180.0 && path[i].position.longitude <= 180.0))
      problems.push_back(where + ".lon: must be in [-180, 180]");
  }

  for (std::size_t i = 0; i < script.user_events.size(); ++i) {
    const auto& ev = script.user_events[i];
    const std::string where = "events[" + std::to_string(i) + "]";
    if (i > 0 && ev.t <= script.user_events[i - 1].t) problems.push_back(where + ": times must strictly increase");
    if (ev.t < 0 || ev.t > script.duration_ms) problems.push_back(where + ": time outside [0, duration_ms]");
  }
  return problems;
}

GeoPoint position_at(const std::vector<Waypoint>& path, VirtualMs t) {
  if (path.empty()) return {};
  if (t <= path.front().t) return path.front().position;
  if (t >= path.back().t) return path.back().position;
  auto next = std::upper_bound(path.begin(), path.end(), t, [](VirtualMs v, const Waypoint& w) { return v < w.t; });
  const auto& b = *next;
  const auto& a = *std::prev(next);
  const double f = static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
  return {a.position.latitude + (b.position.latitude - a.position.latitude) * f,
          a.position.longitude + (b.position.longitude - a.position.longitude) * f};
}

SceneState scene_at(const ScenarioScript& script, VirtualMs t) {
  if (t < 0 || t > script.duration_ms)
    throw DomainError("scene_at: t=" + std::to_string(t) + " outside [0, " + std::to_string(script.duration_ms) + "]");
  SceneState s{.true_cm = {},
               .surface = script.surface.at(t),
               .weather = script.weather.at(t),
               .position = position_at(script.geo_path, t),
               .gps_available = script.gps_available.at(t),
               .network_available = script.network_available.at(t),
               .server_reachable = script.server_reachable.at(t)};
  for (Channel c : kServiceOrder) {
    auto it = script.channel_tracks.find(c);
    s.true_cm[c] = it == script.channel_tracks.end() ? std::nullopt : it->second.at(t);
  }
  return s;
}

CalibrationTable default_calibration() {
  return {
      {{SurfaceKind::Tiles, Weather::Dry}, {.rel_sigma = 0.04, .rel_bias = 0.02, .outlier_prob = 0.03}},
      {{SurfaceKind::Concrete, Weather::Dry}, {.rel_sigma = 0.09, .rel_bias = 0.04, .outlier_prob = 0.05}},
      {{SurfaceKind::Tiles, Weather::Wet}, {.rel_sigma = 0.11, .rel_bias = 0.05, .outlier_prob = 0.06}},
      {{SurfaceKind::Concrete, Weather::Wet}, {.rel_sigma = 0.15, .rel_bias = 0.07, .outlier_prob = 0.08}},
  };
}

CalibrationTable zero_noise_calibration() {
  CalibrationTable t;
  for (auto s : {SurfaceKind::Concrete, SurfaceKind::Tiles})
    for (auto w : {Weather::Dry, Weather::Wet}) t[{s, w}] = NoiseParams{};
  return t;
}

NoiseParams noise_params_for(SurfaceKind surface, Weather weather, const CalibrationTable& table) {
  auto it = table.find({surface, weather});
  if (it == table.end())
    throw ConfigError("calibration: no entry for (" + std::string(to_string(surface)) + ", " +
                      std::string(to_string(weather)) + ")");
  return it->second;
}

std::optional<std::int64_t> sample_echo(std::optional<double> true_cm, const NoiseParams& params, Rng& rng) {
  constexpr double kPulsesPerCm = 58.0;
  if (!true_cm) return std::nullopt;
  if (rng.bernoulli(params.outlier_prob)) {
    const double d = rng.uniform_open(15.0, 645.0);
    return static_cast<std::int64_t>(std::llround(d * kPulsesPerCm));
  }
  const double d = *true_cm * (1.0 + params.rel_bias) + rng.gaussian(0.0, params.rel_sigma * *true_cm);
  return std::max<std::int64_t>(1, std::llround(d * kPulsesPerCm));
}

}  // namespace eyemate
