#include "eyemate/firmware.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace eyemate {

void FirmwareConfig::validate() const {
  if (pulses_per_cm <= 0) throw ConfigError("firmware.pulses_per_cm must be positive");
  if (std::abs(pulses_per_inch - pulses_per_cm * 2.54) >= 1.0)
    throw ConfigError("firmware.pulses_per_inch inconsistent with pulses_per_cm");
  if (samples_per_measurement <= 0 || samples_per_measurement % 2 == 0)
    throw ConfigError("firmware.samples_per_measurement must be odd and positive");
  if (sample_period_ms <= 0) throw ConfigError("firmware.sample_period_ms must be positive");
  if (!(gate_low_cm < ground_alert_cm && ground_alert_cm < gate_high_cm))
    throw ConfigError("firmware: need gate_low_cm < ground_alert_cm < gate_high_cm");
  if (gate_low_cm <= 0 || ground_alert_cm <= 0 || left_alert_cm <= 0 || right_alert_cm <= 0)
    throw ConfigError("firmware: thresholds must be positive");
  if (max_sample_attempts < samples_per_measurement)
    throw ConfigError("firmware.max_sample_attempts must be >= samples_per_measurement");
  if (repeat_ms <= 0) throw ConfigError("firmware.repeat_ms must be positive");
}

Centimeters pulses_to_cm(std::int64_t pulses, const FirmwareConfig& cfg) {
  if (pulses < 0) throw DomainError("pulses_to_cm: negative pulse count");
  const std::int64_t ppc = cfg.pulses_per_cm;
  return static_cast<Centimeters>((2 * pulses + ppc) / (2 * ppc));
}

bool gate_valid(Centimeters d, const FirmwareConfig& cfg) { return d > cfg.gate_low_cm && d < cfg.gate_high_cm; }

namespace {

Centimeters median_odd(std::span<const Centimeters> samples) {
  std::vector<Centimeters> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted[sorted.size() / 2];
}

}  // namespace

Centimeters median9(std::span<const Centimeters> samples) {
  if (samples.size() != 9)
    throw DomainError("median9: expected 9 samples, got " + std::to_string(samples.size()));
  return median_odd(samples);
}

Acquisition acquire_distance(Channel channel, const EchoSource& sensor, VirtualClock& clock,
                             const FirmwareConfig& cfg) {
  Acquisition out;
  std::vector<Centimeters> samples;
  samples.reserve(static_cast<std::size_t>(cfg.samples_per_measurement));
  while (out.polls < cfg.max_sample_attempts &&
         samples.size() < static_cast<std::size_t>(cfg.samples_per_measurement)) {
    const auto echo = sensor(channel, clock.now());
    ++out.polls;
    clock.advance(cfg.sample_period_ms);
    if (!echo) continue;
    const Centimeters d = pulses_to_cm(*echo, cfg);
    if (gate_valid(d, cfg)) samples.push_back(d);
  }
  if (samples.size() == static_cast<std::size_t>(cfg.samples_per_measurement))
    out.distance = samples.size() == 9 ? median9(samples) : median_odd(samples);
  return out;
}

Centimeters alert_threshold(Channel channel, const FirmwareConfig& cfg) {
  switch (channel) {
    case Channel::Ground: return cfg.ground_alert_cm;
    case Channel::Left: return cfg.left_alert_cm;
    case Channel::Right: return cfg.right_alert_cm;
  }
  return 0;
}

std::optional<ObstacleAlert> classify(Channel channel, Centimeters d, const FirmwareConfig& cfg, VirtualMs t) {
  if (d < alert_threshold(channel, cfg)) return ObstacleAlert{channel, d, t};
  return std::nullopt;
}

std::string_view wire_token(Channel channel) {
  switch (channel) {
    case Channel::Ground: return "Ground";
    case Channel::Left: return "Left";
    case Channel::Right: return "Right";
  }
  return "";
}

std::string encode_message(const ObstacleAlert& alert) {
  std::string frame(wire_token(alert.channel));
  frame.push_back('\n');
  return frame;
}

bool& MotorState::operator[](Channel c) {
  switch (c) {
    case Channel::Left: return left;
    case Channel::Right: return right;
    default: return ground;
  }
}

bool MotorState::operator[](Channel c) const { return const_cast<MotorState&>(*this)[c]; }

ChannelReport service_channel(FirmwareState& state, Channel channel, const EchoSource& sensor,
                              VirtualClock& clock, const FirmwareConfig& cfg) {
  ChannelReport r{};
  r.channel = channel;
  r.started = clock.now();
  r.acquisition = acquire_distance(channel, sensor, clock, cfg);
  r.finished = clock.now();
  if (r.acquisition.distance) r.alert = classify(channel, *r.acquisition.distance, cfg, r.finished);

  r.motor_before = state.motors[channel];
  r.motor_after = r.alert.has_value();
  state.motors[channel] = r.motor_after;

  auto& last_emit = state.last_emit[static_cast<std::size_t>(channel)];
  if (r.alert) {
    if (!last_emit || r.finished - *last_emit >= cfg.repeat_ms) {
      r.frame = encode_message(*r.alert);
      last_emit = r.finished;
    }
  } else {
    last_emit.reset();
  }
  return r;
}

TickResult firmware_tick(FirmwareState& state, const EchoSource& sensor, VirtualClock& clock,
                         const FirmwareConfig& cfg) {
  TickResult out;
  for (Channel c : kServiceOrder) {
    auto r = service_channel(state, c, sensor, clock, cfg);
    if (r.frame) out.frames.push_back(*r.frame);
    out.reports.push_back(std::move(r));
  }
  out.motors = state.motors;
  return out;
}

}  // namespace eyemate
