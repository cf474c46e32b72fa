#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "eyemate/location.hpp"
#include "eyemate/rng.hpp"
#include "eyemate/types.hpp"
#include "eyemate/world_sim.hpp"

namespace eyemate {

enum class ObstacleMessage { Ground, Left, Right };
enum class Language { Bengali, English };
enum class Command { CallEmergency, Mute, Unmute };

std::string_view to_string(ObstacleMessage m);
std::string_view to_string(Language l);
Language language_from_string(std::string_view s);
std::string_view to_string(Command c);
Command command_from_string(std::string_view s);

ObstacleMessage message_for(Channel c);

struct AppConfig {
  Language language = Language::English;
  std::map<std::pair<ObstacleMessage, Language>, std::string> phrase_table;
  std::string emergency_number = "999";
  VirtualMs upload_interval_ms = 300000;
  VirtualMs announce_repeat_ms = 2000;
  VirtualMs listen_window_ms = 10000;
  std::map<std::string, Command> command_table;
  std::string device_id = "eyemate-1";
  double gps_sigma_m = 5.0;
  double network_sigma_m = 50.0;

  /// Placeholder phrases and the default command set.
  static AppConfig defaults();
  void validate() const;
};

/// Thrown by decode_message for anything but the three exact tokens.
class UnknownToken : public std::runtime_error {
 public:
  explicit UnknownToken(std::string token)
      : std::runtime_error("unknown token: " + token), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

ObstacleMessage decode_message(std::string_view token);

struct NoAction {
  bool operator==(const NoAction&) const = default;
};
struct Speak {
  std::string text;
  bool operator==(const Speak&) const = default;
};
struct CallEmergency {
  std::string number;
  bool operator==(const CallEmergency&) const = default;
};
struct SetMuted {
  bool muted;
  bool operator==(const SetMuted&) const = default;
};
struct Upload {
  LocationFix fix;
  bool operator==(const Upload&) const = default;
};

using AppAction = std::variant<NoAction, Speak, CallEmergency, SetMuted, Upload>;

struct AnnounceState {
  std::map<ObstacleMessage, VirtualMs> last_spoken;
};

/// Speak unless muted or the same message was spoken within announce_repeat_ms.
AppAction announce(ObstacleMessage msg, AnnounceState& state, bool muted, const AppConfig& cfg,
                   VirtualMs now);

enum class VoiceMode { Idle, Listening };

struct VoiceState {
  VoiceMode mode = VoiceMode::Idle;
  bool muted = false;
  std::optional<VirtualMs> listening_deadline;
};

struct Tick {
  VirtualMs now;
};
using VoiceEvent = std::variant<ButtonPress, Utterance, Tick>;

/// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_command(std::string_view text);

/// ButtonPress needs the current time for the listening deadline.
std::pair<VoiceState, AppAction> voice_fsm_step(const VoiceState& state, const VoiceEvent& event,
                                                const AppConfig& cfg, VirtualMs now);

std::optional<Provider> select_provider(bool gps_available, bool network_available);

/// True position plus isotropic provider error, quantized to 6 decimals.
LocationFix make_fix(const GeoPoint& true_pos, Provider provider, UtcSeconds now,
                     const AppConfig& cfg, Rng& rng);

struct UploaderState {
  std::optional<VirtualMs> last_upload;
  std::optional<VirtualMs> next_due;  // empty: first due at upload_interval_ms
  std::deque<LocationFix> pending;
};

/// Returns true when the server acknowledged the fix.
using DeliverFn = std::function<bool(const LocationFix&)>;

struct UploadTick {
  bool due = false;
  std::optional<Upload> upload;           // emitted this tick
  std::vector<LocationFix> delivered;     // in delivery order, includes flushed backlog
  bool queued = false;                    // emitted fix went to the backlog
};

/// Call at or after each due time. Fixes are delivered oldest first; the first
/// failed delivery leaves it and everything after it queued.
UploadTick uploader_tick(VirtualMs now, UploaderState& state, const std::optional<LocationFix>& current_fix,
                         const DeliverFn& deliver, const AppConfig& cfg);

VirtualMs next_upload_due(const UploaderState& state, const AppConfig& cfg);

}  // namespace eyemate
