#include "eyemate/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>

#include "eyemate/time_util.hpp"

namespace eyemate {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 16> kKindNames{{
    {EventKind::Measurement, "measurement"},
    {EventKind::NoEcho, "no_echo"},
    {EventKind::Alert, "alert"},
    {EventKind::Motor, "motor"},
    {EventKind::Frame, "frame"},
    {EventKind::FrameDropped, "frame_dropped"},
    {EventKind::Decode, "decode"},
    {EventKind::UnknownToken, "unknown_token"},
    {EventKind::Speak, "speak"},
    {EventKind::Call, "call"},
    {EventKind::SetMuted, "set_muted"},
    {EventKind::Button, "button"},
    {EventKind::Utterance, "utterance"},
    {EventKind::ListenTimeout, "listen_timeout"},
    {EventKind::Upload, "upload"},
    {EventKind::ServerAck, "server_ack"},
}};

// splitmix64 finalizer: independent substreams from one seed.
std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

nlohmann::ordered_json fix_json(const LocationFix& fix) { return to_json(fix); }

// Owns all per-run state and the merge of firmware results, user events, and
// upload deadlines onto one time-ordered trace.
class Run {
 public:
  Run(const ScenarioScript& script, const SimConfig& config, std::uint64_t seed, TrackService& server)
      : script_(script),
        cfg_(config),
        sensor_rng_(substream(seed, 0)),
        fix_rng_(substream(seed, 1)),
        link_(config.link, substream(seed, 2)),
        transport_(server),
        client_(transport_) {}

  TraceLog execute() {
    const EchoSource sensor = [this](Channel c, VirtualMs t) {
      const auto scene = scene_at(script_, std::min(t, script_.duration_ms));
      const auto params = noise_params_for(scene.surface, scene.weather, cfg_.calibration);
      return sample_echo(scene.true_cm.at(c), params, sensor_rng_);
    };

    VirtualClock clock;
    std::size_t next_channel = 0;
    while (clock.now() < script_.duration_ms) {
      const Channel channel = kServiceOrder[next_channel];
      next_channel = (next_channel + 1) % std::size(kServiceOrder);
      const VirtualMs started = clock.now();
      const auto truth = scene_at(script_, started);
      auto report = service_channel(firmware_, channel, sensor, clock, cfg_.firmware);
      if (report.finished > script_.duration_ms) break;
      drain(report.finished);
      voice_tick(report.finished);
      record_round(report, truth);
    }
    drain(script_.duration_ms);
    return std::move(trace_);
  }

 private:
  void record_round(const ChannelReport& r, const SceneState& truth) {
    const VirtualMs t = r.finished;
    const std::string ch(to_string(r.channel));
    if (r.acquisition.distance) {
      const auto true_cm = truth.true_cm.at(r.channel);
      trace_.add(t, EventKind::Measurement,
                 {{"channel", ch},
                  {"measured_cm", *r.acquisition.distance},
                  {"true_cm", true_cm ? nlohmann::ordered_json(*true_cm) : nlohmann::ordered_json(nullptr)},
                  {"surface", std::string(to_string(truth.surface))},
                  {"weather", std::string(to_string(truth.weather))},
                  {"polls", r.acquisition.polls}});
    } else {
      trace_.add(t, EventKind::NoEcho, {{"channel", ch}, {"polls", r.acquisition.polls}});
    }
    if (r.alert) trace_.add(t, EventKind::Alert, {{"channel", ch}, {"distance_cm", r.alert->distance_cm}});
    if (r.motor_before != r.motor_after) trace_.add(t, EventKind::Motor, {{"channel", ch}, {"on", r.motor_after}});
    if (!r.frame) return;

    if (!link_.send(*r.frame)) {
      trace_.add(t, EventKind::FrameDropped, {{"bytes", *r.frame}});
      return;
    }
    trace_.add(t, EventKind::Frame, {{"bytes", *r.frame}});
    for (const auto& token : link_.receive()) {
      ObstacleMessage msg;
      try {
        msg = decode_message(token);
      } catch (const UnknownToken&) {
        trace_.add(t, EventKind::UnknownToken, {{"token", token}});
        continue;
      }
      trace_.add(t, EventKind::Decode, {{"token", token}, {"message", std::string(to_string(msg))}});
      const auto action = announce(msg, announce_, voice_.muted, cfg_.app, t);
      if (const auto* speak = std::get_if<Speak>(&action))
        trace_.add(t, EventKind::Speak, {{"message", std::string(to_string(msg))}, {"text", speak->text}});
    }
  }

  void voice_tick(VirtualMs t) {
    const bool was_listening = voice_.mode == VoiceMode::Listening;
    voice_ = voice_fsm_step(voice_, Tick{t}, cfg_.app, t).first;
    if (was_listening && voice_.mode == VoiceMode::Idle) trace_.add(t, EventKind::ListenTimeout);
  }

  // Processes every scheduled user event and upload deadline at or before `until`.
  void drain(VirtualMs until) {
    while (true) {
      const bool have_event = next_event_ < script_.user_events.size() &&
                              script_.user_events[next_event_].t <= until;
      const VirtualMs due = next_upload_due(uploader_, cfg_.app);
      const bool have_upload = due <= until;
      if (!have_event && !have_upload) return;
      if (have_event && (!have_upload || script_.user_events[next_event_].t <= due)) {
        handle_user_event(script_.user_events[next_event_++]);
      } else {
        handle_upload(due);
      }
    }
  }

  void handle_user_event(const UserEvent& ev) {
    voice_tick(ev.t);
    if (const auto* u = std::get_if<Utterance>(&ev.what))
      trace_.add(ev.t, EventKind::Utterance, {{"text", u->text}});
    else
      trace_.add(ev.t, EventKind::Button);

    const VoiceEvent event = std::visit([](const auto& e) -> VoiceEvent { return e; }, ev.what);
    auto [next, action] = voice_fsm_step(voice_, event, cfg_.app, ev.t);
    voice_ = next;
    if (const auto* call = std::get_if<CallEmergency>(&action))
      trace_.add(ev.t, EventKind::Call, {{"number", call->number}});
    else if (const auto* mute = std::get_if<SetMuted>(&action))
      trace_.add(ev.t, EventKind::SetMuted, {{"muted", mute->muted}});
  }

  void handle_upload(VirtualMs t) {
    const auto scene = scene_at(script_, t);
    std::optional<LocationFix> fix;
    if (auto provider = select_provider(scene.gps_available, scene.network_available))
      fix = make_fix(scene.position, *provider, script_.start_utc + t / 1000, cfg_.app, fix_rng_);

    transport_.set_reachable(scene.server_reachable);
    std::vector<FixRecord> acks;
    const DeliverFn deliver = [&](const LocationFix& f) {
      try {
        acks.push_back(client_.post_fix(f));
        return true;
      } catch (const TransportError&) {
        return false;
      } catch (const ServiceError&) {
        return false;
      }
    };
    const auto tick = uploader_tick(t, uploader_, fix, deliver, cfg_.app);
    if (tick.upload) {
      auto data = fix_json(tick.upload->fix);
      data["outcome"] = tick.queued ? "queued" : "delivered";
      data["backlog"] = uploader_.pending.size();
      trace_.add(t, EventKind::Upload, std::move(data));
    }
    for (const auto& r : acks)
      trace_.add(t, EventKind::ServerAck,
                 {{"id", r.id}, {"device_id", r.fix.device_id}, {"timestamp", format_utc(r.fix.timestamp)}});
  }

  const ScenarioScript& script_;
  const SimConfig& cfg_;
  Rng sensor_rng_;
  Rng fix_rng_;
  SerialLink link_;
  LoopbackTransport transport_;
  TrackClient client_;

  FirmwareState firmware_;
  VoiceState voice_;
  AnnounceState announce_;
  UploaderState uploader_;
  std::size_t next_event_ = 0;
  TraceLog trace_;
};

bool subset_match(const nlohmann::json& where, const TraceEvent& ev) {
  for (const auto& [key, value] : where.items()) {
    if (key == "t") {
      if (value != ev.t) return false;
      continue;
    }
    if (!ev.data.contains(key) || nlohmann::json(ev.data[key]) != value) return false;
  }
  return true;
}

std::string describe(const Expectation& e) {
  std::string s = e.quantifier == Quantifier::Eventually ? "eventually " : "never ";
  s += to_string(e.kind);
  if (!e.where.empty()) s += " " + e.where.dump();
  return s;
}

}  // namespace

std::string_view to_string(EventKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

EventKind event_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kKindNames)
    if (name == s) return kind;
  throw DomainError("unknown event kind '" + std::string(s) + "'");
}

void TraceLog::add(VirtualMs t, EventKind kind, nlohmann::ordered_json data) {
  if (!events.empty() && t < events.back().t)
    throw std::logic_error("trace time went backwards at t=" + std::to_string(t));
  events.push_back({t, kind, std::move(data)});
}

std::size_t TraceLog::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const TraceEvent& e) { return e.kind == kind; }));
}

std::string TraceLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events) {
    nlohmann::ordered_json line{{"t", e.t}, {"kind", std::string(to_string(e.kind))}};
    for (const auto& [k, v] : e.data.items()) line[k] = v;
    out += line.dump();
    out += '\n';
  }
  return out;
}

TraceLog TraceLog::from_jsonl(std::istream& in) {
  TraceLog log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::ordered_json::parse(line);
    TraceEvent e{j.at("t").get<VirtualMs>(), event_kind_from_string(j.at("kind").get<std::string>())};
    for (const auto& [k, v] : j.items())
      if (k != "t" && k != "kind") e.data[k] = v;
    log.events.push_back(std::move(e));
  }
  return log;
}

TraceLog run_scenario(const ScenarioScript& script, const SimConfig& config, std::uint64_t seed,
                      TrackService* server) {
  if (auto problems = validate_script(script); !problems.empty()) throw ScenarioError(std::move(problems));
  config.firmware.validate();
  config.app.validate();

  TrackStore local_store;
  TrackService local_service(local_store);
  Run run(script, config, seed, server ? *server : local_service);
  return run.execute();
}

const BucketStats* ErrorReport::bucket(SurfaceKind s, Weather w) const {
  for (const auto& b : buckets)
    if (b.surface == s && b.weather == w) return &b;
  return nullptr;
}

double ErrorReport::weather_mape(Weather w) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& b : buckets) {
    if (b.weather != w) continue;
    sum += b.mape * static_cast<double>(b.count);
    n += b.count;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

std::string ErrorReport::to_table() const {
  std::string out = "surface   weather  samples   MAPE(%)  max(%)\n";
  char buf[128];
  for (const auto& b : buckets) {
    std::snprintf(buf, sizeof buf, "%-9s %-8s %7zu %9.3f %7.3f\n", std::string(to_string(b.surface)).c_str(),
                  std::string(to_string(b.weather)).c_str(), b.count, b.mape, b.max_error);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "overall MAPE %.3f%%  (dry %.3f%%, wet %.3f%%)\n", overall_mape,
                weather_mape(Weather::Dry), weather_mape(Weather::Wet));
  out += buf;
  return out;
}

nlohmann::ordered_json ErrorReport::to_json() const {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& b : buckets)
    rows.push_back({{"surface", std::string(to_string(b.surface))},
                    {"weather", std::string(to_string(b.weather))},
                    {"count", b.count},
                    {"mape", b.mape},
                    {"max_error", b.max_error}});
  return {{"buckets", rows},
          {"overall_mape", overall_mape},
          {"dry_mape", weather_mape(Weather::Dry)},
          {"wet_mape", weather_mape(Weather::Wet)}};
}

ErrorReport error_report(std::span<const TraceLog> traces) {
  struct Acc {
    std::size_t n = 0;
    double sum = 0.0;
    double max = 0.0;
  };
  std::map<std::pair<SurfaceKind, Weather>, Acc> acc;
  for (const auto& trace : traces) {
    for (const auto& e : trace.events) {
      if (e.kind != EventKind::Measurement || !e.data.contains("true_cm") || e.data["true_cm"].is_null()) continue;
      const double truth = e.data["true_cm"].get<double>();
      const double measured = e.data["measured_cm"].get<double>();
      const double err = std::abs(measured - truth) / truth * 100.0;
      auto& a = acc[{surface_from_string(e.data["surface"].get<std::string>()),
                     weather_from_string(e.data["weather"].get<std::string>())}];
      ++a.n;
      a.sum += err;
      a.max = std::max(a.max, err);
    }
  }
  if (acc.empty()) throw DomainError("error_report: no measurement events with true distances");

  ErrorReport report;
  double weighted = 0.0;
  std::size_t total = 0;
  for (const auto& [key, a] : acc) {
    const double mape = a.sum / static_cast<double>(a.n);
    report.buckets.push_back({key.first, key.second, a.n, mape, a.max});
    weighted += mape * static_cast<double>(a.n);
    total += a.n;
  }
  report.overall_mape = weighted / static_cast<double>(total);
  return report;
}

std::vector<int> experiment_grid() {
  std::vector<int> grid;
  for (int d = 20; d <= 600; d += 20) grid.push_back(d);
  return grid;
}

std::vector<TraceLog> run_grid_experiment(const SimConfig& config, std::uint64_t seed) {
  constexpr VirtualMs kDwellMs = 1000;
  const auto grid = experiment_grid();
  std::vector<TraceLog> traces;
  for (auto surface : {SurfaceKind::Concrete, SurfaceKind::Tiles}) {
    for (auto weather : {Weather::Dry, Weather::Wet}) {
      ScenarioScript bench;
      bench.duration_ms = kDwellMs * static_cast<VirtualMs>(grid.size());
      bench.surface = Timeline<SurfaceKind>(surface);
      bench.weather = Timeline<Weather>(weather);
      bench.geo_path = {{0, {}}};
      std::vector<DistanceTrack::Segment> steps;
      for (std::size_t i = 0; i < grid.size(); ++i)
        steps.push_back({kDwellMs * static_cast<VirtualMs>(i), static_cast<double>(grid[i])});
      bench.channel_tracks[Channel::Ground] = DistanceTrack(std::move(steps));

      Rng rng(seed);
      const EchoSource sensor = [&](Channel c, VirtualMs t) {
        const auto scene = scene_at(bench, std::min(t, bench.duration_ms));
        return sample_echo(scene.true_cm.at(c), noise_params_for(scene.surface, scene.weather, config.calibration),
                           rng);
      };

      TraceLog trace;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        VirtualClock clock(kDwellMs * static_cast<VirtualMs>(i));
        const auto truth = scene_at(bench, clock.now());
        const auto acq = acquire_distance(Channel::Ground, sensor, clock, config.firmware);
        if (!acq.distance) {
          trace.add(clock.now(), EventKind::NoEcho, {{"channel", "ground"}, {"polls", acq.polls}});
          continue;
        }
        trace.add(clock.now(), EventKind::Measurement,
                  {{"channel", "ground"},
                   {"measured_cm", *acq.distance},
                   {"true_cm", *truth.true_cm.at(Channel::Ground)},
                   {"surface", std::string(to_string(surface))},
                   {"weather", std::string(to_string(weather))},
                   {"polls", acq.polls}});
      }
      traces.push_back(std::move(trace));
    }
  }
  return traces;
}

ExpectationResult assert_expectations(const TraceLog& trace, std::span<const Expectation> expected) {
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& e = expected[i];
    const auto from = trace.events.begin() + static_cast<std::ptrdiff_t>(cursor);
    const auto hit = std::find_if(from, trace.events.end(),
                                  [&](const TraceEvent& ev) { return ev.kind == e.kind && subset_match(e.where, ev); });
    const VirtualMs after = cursor == 0 ? 0 : trace.events[cursor - 1].t;
    if (e.quantifier == Quantifier::Eventually) {
      if (hit == trace.events.end())
        return {false, "pattern " + std::to_string(i) + " (" + describe(e) + "): no matching event at or after t=" +
                           std::to_string(after)};
      cursor = static_cast<std::size_t>(hit - trace.events.begin()) + 1;
    } else if (hit != trace.events.end()) {
      return {false, "pattern " + std::to_string(i) + " (" + describe(e) + "): matched at t=" + std::to_string(hit->t) +
                         " " + hit->data.dump()};
    }
  }
  return {true, "all " + std::to_string(expected.size()) + " patterns matched"};
}

std::vector<Expectation> expectations_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("expectations: expected a JSON array");
  std::vector<Expectation> out;
  for (const auto& p : j) {
    Expectation e{};
    if (p.contains("eventually")) {
      e.quantifier = Quantifier::Eventually;
      e.kind = event_kind_from_string(p["eventually"].get<std::string>());
    } else if (p.contains("never")) {
      e.quantifier = Quantifier::Never;
      e.kind = event_kind_from_string(p["never"].get<std::string>());
    } else {
      throw ConfigError("expectations: each pattern needs \"eventually\" or \"never\"");
    }
    if (p.contains("where")) e.where = p["where"];
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace eyemate
