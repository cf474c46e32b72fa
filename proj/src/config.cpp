#include "eyemate/config.hpp"

#include <fstream>

#include "eyemate/time_util.hpp"

namespace eyemate {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

void check_schema_version(const nlohmann::json& j, std::vector<std::string>& problems) {
  if (!j.contains("schema_version")) {
    problems.push_back("schema_version: missing");
  } else if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion) {
    problems.push_back("schema_version: unsupported (expected " + std::to_string(kSchemaVersion) + ")");
  }
}

// A timeline is either a bare value (constant) or [{"t": ms, "value": v}, ...].
template <typename T, typename Convert>
Timeline<T> read_timeline(const nlohmann::json& j, const std::string& name, std::vector<std::string>& problems,
                          Convert&& convert) {
  std::vector<typename Timeline<T>::Segment> segs;
  try {
    if (!j.is_array()) return Timeline<T>(convert(j));
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& s = j[i];
      if (!s.is_object() || !s.contains("t") || !s.contains("value")) {
        problems.push_back(name + "[" + std::to_string(i) + "]: expected {\"t\": ms, \"value\": ...}");
        continue;
      }
      segs.push_back({s["t"].get<VirtualMs>(), convert(s["value"])});
    }
  } catch (const std::exception& e) {
    problems.push_back(name + ": " + e.what());
  }
  return Timeline<T>(std::move(segs));
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error("invalid scenario: " + join(problems)), problems_(std::move(problems)) {}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ScenarioScript scenario_from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  ScenarioScript s;
  if (!j.is_object()) throw ScenarioError({"scenario: expected a JSON object"});
  check_schema_version(j, problems);

  if (!j.contains("duration_ms") || !j["duration_ms"].is_number_integer())
    problems.push_back("duration_ms: missing or not an integer");
  else
    s.duration_ms = j["duration_ms"].get<VirtualMs>();

  const std::string start = j.value("start_utc", std::string("2015-06-01T10:00:00Z"));
  if (auto t = parse_utc(start))
    s.start_utc = *t;
  else
    problems.push_back("start_utc: expected YYYY-MM-DDTHH:MM:SSZ");

  if (j.contains("seed")) {
    if (j["seed"].is_number_unsigned())
      s.seed = j["seed"].get<std::uint64_t>();
    else
      problems.push_back("seed: must be an unsigned integer");
  }

  if (j.contains("channels")) {
    for (const auto& [name, track] : j["channels"].items()) {
      Channel c;
      try {
        c = channel_from_string(name);
      } catch (const DomainError&) {
        problems.push_back("channels." + name + ": unknown channel");
        continue;
      }
      s.channel_tracks[c] = read_timeline<std::optional<double>>(
          track, "channels." + name, problems,
          [](const nlohmann::json& v) -> std::optional<double> {
            if (v.is_null()) return std::nullopt;
            return v.get<double>();
          });
    }
  }

  const auto str = [](const nlohmann::json& v) { return v.get<std::string>(); };
  if (j.contains("surface"))
    s.surface = read_timeline<SurfaceKind>(j["surface"], "surface", problems,
                                           [&](const nlohmann::json& v) { return surface_from_string(str(v)); });
  if (j.contains("weather"))
    s.weather = read_timeline<Weather>(j["weather"], "weather", problems,
                                       [&](const nlohmann::json& v) { return weather_from_string(str(v)); });
  const auto boolean = [](const nlohmann::json& v) { return v.get<bool>(); };
  if (j.contains("gps_available"))
    s.gps_available = read_timeline<bool>(j["gps_available"], "gps_available", problems, boolean);
  if (j.contains("network_available"))
    s.network_available = read_timeline<bool>(j["network_available"], "network_available", problems, boolean);
  if (j.contains("server_reachable"))
    s.server_reachable = read_timeline<bool>(j["server_reachable"], "server_reachable", problems, boolean);

  if (j.contains("geo_path")) {
    for (std::size_t i = 0; i < j["geo_path"].size(); ++i) {
      const auto& w = j["geo_path"][i];
      try {
        s.geo_path.push_back({w.at("t").get<VirtualMs>(), {w.at("lat").get<double>(), w.at("lon").get<double>()}});
      } catch (const std::exception& e) {
        problems.push_back("geo_path[" + std::to_string(i) + "]: " + e.what());
      }
    }
  }

  if (j.contains("events")) {
    for (std::size_t i = 0; i < j["events"].size(); ++i) {
      const auto& e = j["events"][i];
      const std::string where = "events[" + std::to_string(i) + "]";
      try {
        const auto t = e.at("t").get<VirtualMs>();
        const auto type = e.at("type").get<std::string>();
        if (type == "button")
          s.user_events.push_back({t, ButtonPress{}});
        else if (type == "utterance")
          s.user_events.push_back({t, Utterance{e.at("text").get<std::string>()}});
        else
          problems.push_back(where + ".type: expected \"button\" or \"utterance\"");
      } catch (const std::exception& ex) {
        problems.push_back(where + ": " + ex.what());
      }
    }
  }

  if (problems.empty()) problems = validate_script(s);
  if (!problems.empty()) throw ScenarioError(std::move(problems));
  return s;
}

ScenarioScript load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json_file(path)); }

SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig cfg;
  std::vector<std::string> problems;
  check_schema_version(j, problems);
  if (!problems.empty()) throw ConfigError(join(problems));

  try {
    if (j.contains("firmware")) {
      const auto& f = j["firmware"];
      auto& fw = cfg.firmware;
      fw.pulses_per_cm = f.value("pulses_per_cm", fw.pulses_per_cm);
      fw.pulses_per_inch = f.value("pulses_per_inch", fw.pulses_per_inch);
      fw.samples_per_measurement = f.value("samples_per_measurement", fw.samples_per_measurement);
      fw.sample_period_ms = f.value("sample_period_ms", fw.sample_period_ms);
      fw.gate_low_cm = f.value("gate_low_cm", fw.gate_low_cm);
      fw.gate_high_cm = f.value("gate_high_cm", fw.gate_high_cm);
      fw.ground_alert_cm = f.value("ground_alert_cm", fw.ground_alert_cm);
      fw.left_alert_cm = f.value("left_alert_cm", fw.left_alert_cm);
      fw.right_alert_cm = f.value("right_alert_cm", fw.right_alert_cm);
      fw.max_sample_attempts = f.value("max_sample_attempts", fw.max_sample_attempts);
      fw.repeat_ms = f.value("repeat_ms", fw.repeat_ms);
    }

    if (j.contains("calibration")) {
      CalibrationTable table;
      for (const auto& e : j["calibration"]) {
        const auto key = std::pair{surface_from_string(e.at("surface").get<std::string>()),
                                   weather_from_string(e.at("weather").get<std::string>())};
        NoiseParams p{e.at("rel_sigma").get<double>(), e.value("rel_bias", 0.0), e.value("outlier_prob", 0.0)};
        if (p.rel_sigma < 0 || p.outlier_prob < 0 || p.outlier_prob > 1)
          throw ConfigError("calibration: rel_sigma must be >= 0 and outlier_prob in [0, 1]");
        table[key] = p;
      }
      for (auto s : {SurfaceKind::Concrete, SurfaceKind::Tiles})
        for (auto w : {Weather::Dry, Weather::Wet}) noise_params_for(s, w, table);
      cfg.calibration = std::move(table);
    }

    if (j.contains("app")) {
      const auto& a = j["app"];
      auto& app = cfg.app;
      if (a.contains("language")) app.language = language_from_string(a["language"].get<std::string>());
      if (a.contains("phrases")) {
        for (const auto& [lang, table] : a["phrases"].items())
          for (const auto& [msg, text] : table.items())
            app.phrase_table[{decode_message(msg), language_from_string(lang)}] = text.get<std::string>();
      }
      if (a.contains("commands")) {
        app.command_table.clear();
        for (const auto& [phrase, action] : a["commands"].items())
          app.command_table[normalize_command(phrase)] = command_from_string(action.get<std::string>());
      }
      app.emergency_number = a.value("emergency_number", app.emergency_number);
      app.upload_interval_ms = a.value("upload_interval_ms", app.upload_interval_ms);
      app.announce_repeat_ms = a.value("announce_repeat_ms", app.announce_repeat_ms);
      app.listen_window_ms = a.value("listen_window_ms", app.listen_window_ms);
      app.device_id = a.value("device_id", app.device_id);
      app.gps_sigma_m = a.value("gps_sigma_m", app.gps_sigma_m);
      app.network_sigma_m = a.value("network_sigma_m", app.network_sigma_m);
    }

    if (j.contains("link")) cfg.link.drop_prob = j["link"].value("drop_prob", 0.0);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  cfg.firmware.validate();
  cfg.app.validate();
  if (cfg.link.drop_prob < 0 || cfg.link.drop_prob > 1) throw ConfigError("link.drop_prob must be in [0, 1]");
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json_file(path)); }

}  // namespace eyemate
