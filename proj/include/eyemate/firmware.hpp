#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eyemate/types.hpp"

namespace eyemate {

struct FirmwareConfig {
  int pulses_per_cm = 58;
  int pulses_per_inch = 147;  // only checked for consistency with pulses_per_cm
  int samples_per_measurement = 9;
  VirtualMs sample_period_ms = 10;
  Centimeters gate_low_cm = 15;
  Centimeters gate_high_cm = 645;
  Centimeters ground_alert_cm = 60;
  Centimeters left_alert_cm = 100;
  Centimeters right_alert_cm = 100;
  int max_sample_attempts = 50;
  VirtualMs repeat_ms = 2000;

  /// Throws ConfigError listing the first violated invariant.
  void validate() const;
};

class VirtualClock {
 public:
  explicit VirtualClock(VirtualMs start = 0) : now_(start) {}
  VirtualMs now() const { return now_; }
  void advance(VirtualMs ms) { now_ += ms; }

 private:
  VirtualMs now_;
};

/// Yields one optional raw pulse count per poll of a channel at a given time.
using EchoSource = std::function<std::optional<std::int64_t>(Channel, VirtualMs)>;

Centimeters pulses_to_cm(std::int64_t pulses, const FirmwareConfig& cfg = {});
bool gate_valid(Centimeters d, const FirmwareConfig& cfg = {});

/// Middle order statistic of exactly nine samples.
Centimeters median9(std::span<const Centimeters> samples);

struct Acquisition {
  std::optional<Centimeters> distance;  // empty: NoEcho
  int polls = 0;
};

/// Polls until nine gate-valid samples are collected (or the attempt limit
/// runs out) and returns their median. Advances the clock one sample period per poll.
Acquisition acquire_distance(Channel channel, const EchoSource& sensor, VirtualClock& clock,
                             const FirmwareConfig& cfg = {});

struct ObstacleAlert {
  Channel channel;
  Centimeters distance_cm;
  VirtualMs t;
};

Centimeters alert_threshold(Channel channel, const FirmwareConfig& cfg);
std::optional<ObstacleAlert> classify(Channel channel, Centimeters d, const FirmwareConfig& cfg = {},
                                      VirtualMs t = 0);

/// Wire frame for an alert: the bare token followed by '\n'.
std::string encode_message(const ObstacleAlert& alert);
std::string_view wire_token(Channel channel);

struct MotorState {
  bool ground = false;
  bool left = false;
  bool right = false;

  bool& operator[](Channel c);
  bool operator[](Channel c) const;
  bool operator==(const MotorState&) const = default;
};

struct FirmwareState {
  MotorState motors;
  std::array<std::optional<VirtualMs>, 3> last_emit{};  // per channel, while the alert persists
};

struct ChannelReport {
  Channel channel;
  VirtualMs started;
  VirtualMs finished;
  Acquisition acquisition;
  std::optional<ObstacleAlert> alert;
  bool motor_before = false;
  bool motor_after = false;
  std::optional<std::string> frame;
};

/// One measurement round on a single channel; updates motor and emission state.
ChannelReport service_channel(FirmwareState& state, Channel channel, const EchoSource& sensor,
                              VirtualClock& clock, const FirmwareConfig& cfg);

struct TickResult {
  MotorState motors;
  std::vector<std::string> frames;
  std::vector<ChannelReport> reports;
};

/// Services Ground, Left, Right in that order.
TickResult firmware_tick(FirmwareState& state, const EchoSource& sensor, VirtualClock& clock,
                         const FirmwareConfig& cfg);

}  // namespace eyemate
