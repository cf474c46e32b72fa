#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eyemate/assist_app.hpp"
#include "eyemate/firmware.hpp"
#include "eyemate/serial_link.hpp"
#include "eyemate/world_sim.hpp"

namespace eyemate {

inline constexpr int kSchemaVersion = 1;

/// Everything a run needs besides the scenario itself.
struct SimConfig {
  FirmwareConfig firmware;
  CalibrationTable calibration = default_calibration();
  AppConfig app = AppConfig::defaults();
  LinkFaultProfile link;
};

/// Carries every field diagnostic found while reading a scenario.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

ScenarioScript scenario_from_json(const nlohmann::json& j);
ScenarioScript load_scenario(const std::filesystem::path& path);

/// Missing sections fall back to defaults; a partial calibration table is an error.
SimConfig config_from_json(const nlohmann::json& j);
SimConfig load_config(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace eyemate
