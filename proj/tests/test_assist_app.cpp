#include <doctest.h>

#include <cmath>
#include <deque>

#include "eyemate/assist_app.hpp"
#include "eyemate/firmware.hpp"

using namespace eyemate;

namespace {

const AppConfig kCfg = AppConfig::defaults();

LocationFix fix_at(UtcSeconds t) { return {"d1", 22.9, 89.5, t, Provider::Gps}; }

}  // namespace

TEST_CASE("decode_message accepts exactly the three tokens") {
  CHECK(decode_message("Ground") == ObstacleMessage::Ground);
  CHECK(decode_message("Left") == ObstacleMessage::Left);
  CHECK(decode_message("Right") == ObstacleMessage::Right);
  CHECK_THROWS_AS(decode_message("ground"), UnknownToken);
  CHECK_THROWS_AS(decode_message("Ground "), UnknownToken);
  CHECK_THROWS_AS(decode_message(""), UnknownToken);
}

TEST_CASE("decode inverts encode for every channel") {
  for (Channel c : kServiceOrder) {
    std::string frame = encode_message({c, 30, 0});
    REQUIRE(frame.back() == '\n');
    frame.pop_back();
    CHECK(decode_message(frame) == message_for(c));
  }
}

TEST_CASE("announce speaks the configured phrase once per repeat interval") {
  AnnounceState state;
  const auto first = announce(ObstacleMessage::Ground, state, false, kCfg, 0);
  REQUIRE(std::holds_alternative<Speak>(first));
  CHECK(std::get<Speak>(first).text == kCfg.phrase_table.at({ObstacleMessage::Ground, Language::English}));

  CHECK(std::holds_alternative<NoAction>(announce(ObstacleMessage::Ground, state, false, kCfg, 1999)));
  // Other messages are tracked independently.
  CHECK(std::holds_alternative<Speak>(announce(ObstacleMessage::Left, state, false, kCfg, 1999)));
  CHECK(std::holds_alternative<Speak>(announce(ObstacleMessage::Ground, state, false, kCfg, 2000)));
}

TEST_CASE("announce is silent when muted and uses the configured language") {
  AnnounceState state;
  CHECK(std::holds_alternative<NoAction>(announce(ObstacleMessage::Ground, state, true, kCfg, 0)));

  AppConfig bn = kCfg;
  bn.language = Language::Bengali;
  const auto a = announce(ObstacleMessage::Right, state, false, bn, 0);
  CHECK(std::get<Speak>(a).text == bn.phrase_table.at({ObstacleMessage::Right, Language::Bengali}));

  AppConfig broken = kCfg;
  broken.phrase_table.erase({ObstacleMessage::Left, Language::English});
  CHECK_THROWS_AS(announce(ObstacleMessage::Left, state, false, broken, 0), ConfigError);
  CHECK_THROWS_AS(broken.validate(), ConfigError);
}

TEST_CASE("normalize_command") {
  CHECK(normalize_command("  I   Need\tHELP \n") == "i need help");
  CHECK(normalize_command("") == "");
  CHECK(normalize_command("stop speaking") == "stop speaking");
}

TEST_CASE("voice FSM: button then command") {
  VoiceState idle;
  auto [listening, a0] = voice_fsm_step(idle, ButtonPress{}, kCfg, 1000);
  CHECK(listening.mode == VoiceMode::Listening);
  CHECK(listening.listening_deadline == 11000);
  CHECK(std::holds_alternative<NoAction>(a0));

  auto [after, a1] = voice_fsm_step(listening, Utterance{"I need help"}, kCfg, 2000);
  CHECK(after.mode == VoiceMode::Idle);
  CHECK_FALSE(after.listening_deadline.has_value());
  CHECK(a1 == AppAction{CallEmergency{kCfg.emergency_number}});

  auto [after2, a2] = voice_fsm_step(listening, Utterance{"what time is it"}, kCfg, 2000);
  CHECK(after2.mode == VoiceMode::Idle);
  CHECK(std::holds_alternative<NoAction>(a2));
}

TEST_CASE("voice FSM: utterances without a button press are ignored") {
  VoiceState idle;
  auto [s, a] = voice_fsm_step(idle, Utterance{"I need help"}, kCfg, 0);
  CHECK(s.mode == VoiceMode::Idle);
  CHECK(std::holds_alternative<NoAction>(a));
}

TEST_CASE("voice FSM: listening window expires") {
  auto [listening, _] = voice_fsm_step(VoiceState{}, ButtonPress{}, kCfg, 0);
  auto [still, a0] = voice_fsm_step(listening, Tick{10000}, kCfg, 10000);
  CHECK(still.mode == VoiceMode::Listening);
  auto [expired, a1] = voice_fsm_step(listening, Tick{10001}, kCfg, 10001);
  CHECK(expired.mode == VoiceMode::Idle);
  CHECK_FALSE(expired.listening_deadline.has_value());

  // A late utterance without an intervening tick is also rejected.
  auto [late, a2] = voice_fsm_step(listening, Utterance{"i need help"}, kCfg, 10001);
  CHECK(late.mode == VoiceMode::Idle);
  CHECK(std::holds_alternative<NoAction>(a2));
}

TEST_CASE("voice FSM: mute and unmute") {
  VoiceState s;
  s = voice_fsm_step(s, ButtonPress{}, kCfg, 0).first;
  auto [muted, a] = voice_fsm_step(s, Utterance{"Stop speaking"}, kCfg, 10);
  CHECK(muted.muted);
  CHECK(a == AppAction{SetMuted{true}});

  // Emergency calls still work while muted.
  auto listening = voice_fsm_step(muted, ButtonPress{}, kCfg, 20).first;
  auto [still_muted, call] = voice_fsm_step(listening, Utterance{"i need help"}, kCfg, 30);
  CHECK(still_muted.muted);
  CHECK(std::holds_alternative<CallEmergency>(call));

  listening = voice_fsm_step(still_muted, ButtonPress{}, kCfg, 40).first;
  auto [unmuted, b] = voice_fsm_step(listening, Utterance{"start speaking"}, kCfg, 50);
  CHECK_FALSE(unmuted.muted);
  CHECK(b == AppAction{SetMuted{false}});
}

TEST_CASE("voice FSM: deadline present iff listening (random event sequences)") {
  Rng rng(8);
  VoiceState s;
  VirtualMs now = 0;
  const char* phrases[] = {"i need help", "stop speaking", "start speaking", "hello"};
  for (int i = 0; i < 5000; ++i) {
    now += static_cast<VirtualMs>(rng.uniform() * 6000);
    VoiceEvent ev;
    switch (rng.next_u64() % 3) {
      case 0: ev = ButtonPress{}; break;
      case 1: ev = Utterance{phrases[rng.next_u64() % 4]}; break;
      default: ev = Tick{now}; break;
    }
    const bool was_listening = s.mode == VoiceMode::Listening;
    auto [next, action] = voice_fsm_step(s, ev, kCfg, now);
    REQUIRE((next.mode == VoiceMode::Listening) == next.listening_deadline.has_value());
    if (std::holds_alternative<CallEmergency>(action)) {
      REQUIRE(was_listening);
      REQUIRE(std::holds_alternative<Utterance>(ev));
      REQUIRE(now <= *s.listening_deadline);
    }
    s = next;
  }
}

TEST_CASE("select_provider prefers GPS") {
  CHECK(select_provider(true, true) == Provider::Gps);
  CHECK(select_provider(true, false) == Provider::Gps);
  CHECK(select_provider(false, true) == Provider::Network);
  CHECK_FALSE(select_provider(false, false).has_value());
}

TEST_CASE("make_fix: zero noise returns the true position") {
  AppConfig cfg = kCfg;
  cfg.gps_sigma_m = 0.0;
  Rng rng(1);
  const auto f = make_fix({22.9, 89.5}, Provider::Gps, 1433152800, cfg, rng);
  CHECK(f.latitude == 22.9);
  CHECK(f.longitude == 89.5);
  CHECK(f.timestamp == 1433152800);
  CHECK(f.provider == Provider::Gps);
  CHECK(f.device_id == cfg.device_id);
}

TEST_CASE("make_fix: network error is about ten times GPS error") {
  // Monte-Carlo estimate of the north-south spread in metres for each provider.
  const auto spread = [](Provider p) {
    Rng rng(2024);
    double sq = 0.0;
    constexpr int n = 1000;
    for (int i = 0; i < n; ++i) {
      const auto f = make_fix({0.0, 0.0}, p, 0, kCfg, rng);
      const double north_m = f.latitude * 111320.0;
      sq += north_m * north_m;
    }
    return std::sqrt(sq / n);
  };
  const double ratio = spread(Provider::Network) / spread(Provider::Gps);
  CHECK(ratio == doctest::Approx(10.0).epsilon(0.2));
}

TEST_CASE("make_fix stays inside coordinate bounds near the pole and antimeridian") {
  AppConfig cfg = kCfg;
  cfg.network_sigma_m = 5000.0;
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const auto a = make_fix({89.9999, 179.9999}, Provider::Network, 0, cfg, rng);
    REQUIRE(a.latitude <= 90.0);
    REQUIRE(a.latitude >= -90.0);
    REQUIRE(a.longitude <= 180.0);
    REQUIRE(a.longitude >= -180.0);
  }
}

TEST_CASE("uploader: first upload at one interval, then every interval") {
  UploaderState st;
  std::vector<VirtualMs> uploads;
  const DeliverFn ok = [](const LocationFix&) { return true; };
  for (VirtualMs t = 0; t <= 20 * 60000; t += 1000) {
    auto r = uploader_tick(t, st, fix_at(t / 1000), ok, kCfg);
    if (r.upload) uploads.push_back(t);
  }
  CHECK(uploads == std::vector<VirtualMs>{300000, 600000, 900000, 1200000});
  CHECK(st.last_upload == 1200000);
}

TEST_CASE("uploader: failed deliveries are queued and flushed in order") {
  UploaderState st;
  std::vector<LocationFix> server;
  bool reachable = true;
  const DeliverFn deliver = [&](const LocationFix& f) {
    if (!reachable) return false;
    server.push_back(f);
    return true;
  };
  // Server down for minutes 4-11.
  for (VirtualMs minute = 1; minute <= 15; ++minute) {
    const VirtualMs t = minute * 60000;
    reachable = minute < 4 || minute > 11;
    auto r = uploader_tick(t, st, fix_at(t / 1000), deliver, kCfg);
    if (minute == 5 || minute == 10) {
      CHECK(r.queued);
      CHECK(r.delivered.empty());
    }
    if (minute == 15) CHECK(r.delivered.size() == 3);
  }
  REQUIRE(server.size() == 3);
  CHECK(server[0].timestamp == 300);
  CHECK(server[1].timestamp == 600);
  CHECK(server[2].timestamp == 900);
  CHECK(st.pending.empty());
}

TEST_CASE("uploader: no fix at a due time skips to the next interval") {
  UploaderState st;
  int delivered = 0;
  const DeliverFn ok = [&](const LocationFix&) { return ++delivered, true; };
  auto r = uploader_tick(300000, st, std::nullopt, ok, kCfg);
  CHECK(r.due);
  CHECK_FALSE(r.upload.has_value());
  CHECK(st.pending.empty());
  CHECK(next_upload_due(st, kCfg) == 600000);
  CHECK_FALSE(uploader_tick(599999, st, fix_at(1), ok, kCfg).due);
  CHECK(uploader_tick(600000, st, fix_at(600), ok, kCfg).upload.has_value());
  CHECK(delivered == 1);
}
