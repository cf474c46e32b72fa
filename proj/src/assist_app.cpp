#include "eyemate/assist_app.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace eyemate {

std::string_view to_string(ObstacleMessage m) {
  switch (m) {
    case ObstacleMessage::Ground: return "Ground";
    case ObstacleMessage::Left: return "Left";
    case ObstacleMessage::Right: return "Right";
  }
  return "";
}

std::string_view to_string(Language l) { return l == Language::Bengali ? "bengali" : "english"; }

Language language_from_string(std::string_view s) {
  if (s == "bengali") return Language::Bengali;
  if (s == "english") return Language::English;
  throw ConfigError("unknown language '" + std::string(s) + "'");
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::CallEmergency: return "call_emergency";
    case Command::Mute: return "mute";
    case Command::Unmute: return "unmute";
  }
  return "";
}

Command command_from_string(std::string_view s) {
  if (s == "call_emergency") return Command::CallEmergency;
  if (s == "mute") return Command::Mute;
  if (s == "unmute") return Command::Unmute;
  throw ConfigError("unknown command action '" + std::string(s) + "'");
}

ObstacleMessage message_for(Channel c) {
  switch (c) {
    case Channel::Ground: return ObstacleMessage::Ground;
    case Channel::Left: return ObstacleMessage::Left;
    case Channel::Right: return ObstacleMessage::Right;
  }
  return ObstacleMessage::Ground;
}

AppConfig AppConfig::defaults() {
  AppConfig cfg;
  // Placeholder phrasing; deployments supply their own table.
  cfg.phrase_table = {
      {{ObstacleMessage::Ground, Language::English}, "Obstacle on the ground"},
      {{ObstacleMessage::Left, Language::English}, "Obstacle on the left"},
      {{ObstacleMessage::Right, Language::English}, "Obstacle on the right"},
      {{ObstacleMessage::Ground, Language::Bengali}, "মাটিতে বাধা"},
      {{ObstacleMessage::Left, Language::Bengali}, "বাম দিকে বাধা"},
      {{ObstacleMessage::Right, Language::Bengali}, "ডান দিকে বাধা"},
  };
  cfg.command_table = {
      {"i need help", Command::CallEmergency},
      {"stop speaking", Command::Mute},
      {"start speaking", Command::Unmute},
  };
  return cfg;
}

void AppConfig::validate() const {
  if (upload_interval_ms <= 0) throw ConfigError("app.upload_interval_ms must be positive");
  if (announce_repeat_ms < 0) throw ConfigError("app.announce_repeat_ms must be non-negative");
  if (listen_window_ms <= 0) throw ConfigError("app.listen_window_ms must be positive");
  if (gps_sigma_m < 0 || network_sigma_m < 0) throw ConfigError("app: provider sigma must be non-negative");
  for (auto m : {ObstacleMessage::Ground, ObstacleMessage::Left, ObstacleMessage::Right})
    for (auto l : {Language::Bengali, Language::English})
      if (!phrase_table.contains({m, l}))
        throw ConfigError("app.phrases: missing " + std::string(to_string(l)) + "/" + std::string(to_string(m)));
  for (const auto& [key, _] : command_table)
    if (key != normalize_command(key)) throw ConfigError("app.commands: key '" + key + "' is not normalized");
}

ObstacleMessage decode_message(std::string_view token) {
  if (token == "Ground") return ObstacleMessage::Ground;
  if (token == "Left") return ObstacleMessage::Left;
  if (token == "Right") return ObstacleMessage::Right;
  throw UnknownToken(std::string(token));
}

AppAction announce(ObstacleMessage msg, AnnounceState& state, bool muted, const AppConfig& cfg, VirtualMs now) {
  if (muted) return NoAction{};
  auto phrase = cfg.phrase_table.find({msg, cfg.language});
  if (phrase == cfg.phrase_table.end())
    throw ConfigError("no phrase for " + std::string(to_string(msg)) + " in " + std::string(to_string(cfg.language)));
  auto last = state.last_spoken.find(msg);
  if (last != state.last_spoken.end() && now - last->second < cfg.announce_repeat_ms) return NoAction{};
  state.last_spoken[msg] = now;
  return Speak{phrase->second};
}

std::string normalize_command(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::pair<VoiceState, AppAction> voice_fsm_step(const VoiceState& state, const VoiceEvent& event,
                                                const AppConfig& cfg, VirtualMs now) {
  VoiceState next = state;
  const auto go_idle = [&] {
    next.mode = VoiceMode::Idle;
    next.listening_deadline.reset();
  };

  if (std::holds_alternative<ButtonPress>(event)) {
    next.mode = VoiceMode::Listening;
    next.listening_deadline = now + cfg.listen_window_ms;
    return {next, NoAction{}};
  }

  if (const auto* tick = std::get_if<Tick>(&event)) {
    if (state.mode == VoiceMode::Listening && tick->now > *state.listening_deadline) go_idle();
    return {next, NoAction{}};
  }

  const auto& utterance = std::get<Utterance>(event);
  if (state.mode != VoiceMode::Listening) return {next, NoAction{}};
  const bool expired = now > *state.listening_deadline;
  go_idle();
  if (expired) return {next, NoAction{}};

  auto it = cfg.command_table.find(normalize_command(utterance.text));
  if (it == cfg.command_table.end()) return {next, NoAction{}};
  switch (it->second) {
    case Command::CallEmergency: return {next, CallEmergency{cfg.emergency_number}};
    case Command::Mute: next.muted = true; return {next, SetMuted{true}};
    case Command::Unmute: next.muted = false; return {next, SetMuted{false}};
  }
  return {next, NoAction{}};
}

std::optional<Provider> select_provider(bool gps_available, bool network_available) {
  if (gps_available) return Provider::Gps;
  if (network_available) return Provider::Network;
  return std::nullopt;
}

LocationFix make_fix(const GeoPoint& true_pos, Provider provider, UtcSeconds now, const AppConfig& cfg, Rng& rng) {
  constexpr double kMetersPerDegree = 111320.0;
  const double sigma_m = provider == Provider::Gps ? cfg.gps_sigma_m : cfg.network_sigma_m;
  const double north_m = rng.gaussian(0.0, sigma_m);
  const double east_m = rng.gaussian(0.0, sigma_m);
  const double cos_lat = std::max(std::cos(true_pos.latitude * std::numbers::pi / 180.0), 1e-6);

  double lat = std::clamp(true_pos.latitude + north_m / kMetersPerDegree, -90.0, 90.0);
  double lon = true_pos.longitude + east_m / (kMetersPerDegree * cos_lat);
  lon = std::remainder(lon, 360.0);  // into [-180, 180]

  return {.device_id = cfg.device_id,
          .latitude = round_coordinate(lat),
          .longitude = round_coordinate(lon),
          .timestamp = now,
          .provider = provider};
}

VirtualMs next_upload_due(const UploaderState& state, const AppConfig& cfg) {
  return state.next_due.value_or(cfg.upload_interval_ms);
}

UploadTick uploader_tick(VirtualMs now, UploaderState& state, const std::optional<LocationFix>& current_fix,
                         const DeliverFn& deliver, const AppConfig& cfg) {
  UploadTick out;
  VirtualMs due = next_upload_due(state, cfg);
  if (now < due) return out;
  out.due = true;
  while (due <= now) due += cfg.upload_interval_ms;
  state.next_due = due;

  if (!current_fix) return out;
  out.upload = Upload{*current_fix};
  state.last_upload = now;
  state.pending.push_back(*current_fix);
  while (!state.pending.empty() && deliver(state.pending.front())) {
    out.delivered.push_back(state.pending.front());
    state.pending.pop_front();
  }
  out.queued = !state.pending.empty();
  return out;
}

}  // namespace eyemate
