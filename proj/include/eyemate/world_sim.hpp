#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eyemate/rng.hpp"
#include "eyemate/types.hpp"

namespace eyemate {

/// Piecewise-constant value over virtual time. Segment i holds from its start
/// until the next segment's start; the first segment must start at 0.
template <typename T>
class Timeline {
 public:
  struct Segment {
    VirtualMs start;
    T value;
  };

  Timeline() = default;
  explicit Timeline(T constant) : segments_{{0, std::move(constant)}} {}
  explicit Timeline(std::vector<Segment> segments) : segments_(std::move(segments)) {}

  const T& at(VirtualMs t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](VirtualMs v, const Segment& s) { return v < s.start; });
    if (it == segments_.begin()) throw DomainError("timeline queried before its first segment");
    return std::prev(it)->value;
  }

  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

 private:
  std::vector<Segment> segments_;
};

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

struct Waypoint {
  VirtualMs t;
  GeoPoint position;
};

struct ButtonPress {};
struct Utterance {
  std::string text;
};

struct UserEvent {
  VirtualMs t;
  std::variant<ButtonPress, Utterance> what;
};

using DistanceTrack = Timeline<std::optional<double>>;

struct ScenarioScript {
  VirtualMs duration_ms = 0;
  UtcSeconds start_utc = 0;
  std::map<Channel, DistanceTrack> channel_tracks;  // missing channel: never an obstacle
  Timeline<SurfaceKind> surface{SurfaceKind::Tiles};
  Timeline<Weather> weather{Weather::Dry};
  std::vector<Waypoint> geo_path;
  Timeline<bool> gps_available{true};
  Timeline<bool> network_available{true};
  // Not part of the walker's world proper: lets scenarios model an unreachable server.
  Timeline<bool> server_reachable{true};
  std::vector<UserEvent> user_events;
  std::uint64_t seed = 0;
};

struct SceneState {
  std::map<Channel, std::optional<double>> true_cm;
  SurfaceKind surface;
  Weather weather;
  GeoPoint position;
  bool gps_available;
  bool network_available;
  bool server_reachable;
};

/// Returns every invariant violation as "field: message"; empty when valid.
std::vector<std::string> validate_script(const ScenarioScript& script);

SceneState scene_at(const ScenarioScript& script, VirtualMs t);
GeoPoint position_at(const std::vector<Waypoint>& path, VirtualMs t);

struct NoiseParams {
  double rel_sigma = 0.0;
  double rel_bias = 0.0;
  double outlier_prob = 0.0;
};

using CalibrationTable = std::map<std::pair<SurfaceKind, Weather>, NoiseParams>;

/// Shipped calibration, tuned so the grid experiment lands inside its targets.
CalibrationTable default_calibration();

/// All-zero noise for every (surface, weather) pair.
CalibrationTable zero_noise_calibration();

NoiseParams noise_params_for(SurfaceKind surface, Weather weather, const CalibrationTable& table);

/// One simulated echo as a raw pulse count. nullopt when nothing is in range.
std::optional<std::int64_t> sample_echo(std::optional<double> true_cm, const NoiseParams& params, Rng& rng);

}  // namespace eyemate
