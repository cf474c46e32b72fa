#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eyemate/config.hpp"
#include "eyemate/track_service.hpp"

namespace eyemate {

enum class EventKind {
  Measurement,   // channel, measured_cm, true_cm, surface, weather
  NoEcho,        // channel, polls
  Alert,         // channel, distance_cm
  Motor,         // channel, on
  Frame,         // bytes
  FrameDropped,  // bytes
  Decode,        // token, message
  UnknownToken,  // token
  Speak,         // message, text
  Call,          // number
  SetMuted,      // muted
  Button,
  Utterance,     // text
  ListenTimeout,
  Upload,        // fix, outcome ("delivered" | "queued")
  ServerAck,     // id, device_id, timestamp
};

std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

struct TraceEvent {
  VirtualMs t;
  EventKind kind;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();
};

struct TraceLog {
  std::vector<TraceEvent> events;

  void add(VirtualMs t, EventKind kind, nlohmann::ordered_json data = nlohmann::ordered_json::object());
  std::size_t count(EventKind kind) const;

  /// One JSON object per line: {"t":..,"kind":..,<data fields>}.
  std::string to_jsonl() const;
  static TraceLog from_jsonl(std::istream& in);
};

/// Runs the whole pipeline on the virtual clock. Uploads go to `server` when
/// given, otherwise to a private in-memory store. Throws ScenarioError for an
/// invalid script before anything runs.
TraceLog run_scenario(const ScenarioScript& script, const SimConfig& config, std::uint64_t seed,
                      TrackService* server = nullptr);

struct BucketStats {
  SurfaceKind surface;
  Weather weather;
  std::size_t count = 0;
  double mape = 0.0;       // %
  double max_error = 0.0;  // %
};

struct ErrorReport {
  std::vector<BucketStats> buckets;  // sorted by (surface, weather)
  double overall_mape = 0.0;

  const BucketStats* bucket(SurfaceKind s, Weather w) const;
  /// Sample-weighted MAPE over the buckets with the given weather.
  double weather_mape(Weather w) const;

  std::string to_table() const;
  nlohmann::ordered_json to_json() const;
};

/// Throws DomainError when the traces hold no measurement events.
ErrorReport error_report(std::span<const TraceLog> traces);

/// True distances of the bench grid: 20, 40, ..., 600 cm.
std::vector<int> experiment_grid();

/// One trace per (surface, weather) bucket: each grid distance measured once
/// by the ground channel with the configured calibration.
std::vector<TraceLog> run_grid_experiment(const SimConfig& config, std::uint64_t seed);

enum class Quantifier { Eventually, Never };

struct Expectation {
  Quantifier quantifier;
  EventKind kind;
  nlohmann::json where = nlohmann::json::object();  // subset match on event data
};

struct ExpectationResult {
  bool pass = true;
  std::string message;
};

/// Patterns are matched in order from a moving cursor: `eventually` advances
/// the cursor past its match; `never` forbids a match from the cursor to the end.
ExpectationResult assert_expectations(const TraceLog& trace, std::span<const Expectation> expected);

/// [{"eventually":"speak","where":{...}}, {"never":"call"}]
std::vector<Expectation> expectations_from_json(const nlohmann::json& j);

}  // namespace eyemate
