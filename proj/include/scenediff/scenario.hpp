#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "scenediff/change_detector.hpp"
#include "scenediff/nn_baseline.hpp"
#include "scenediff/simulator.hpp"

namespace scenediff {

struct BaselineConfig {
    std::string kind = "nn";  // "nn" or "none"
    NnParams nn;
    int points_per_view = 1200;
};

/// Everything a scenario run needs; parsed from a JSON document with defaults
/// for every omitted field.
struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    bool seed_in_file = false;  // file carried an explicit seed (affects env precedence)
    sim::SceneConfig scene;
    sim::ChangeSpecList changes;
    sim::TrajectoryConfig trajectory;
    sim::NoiseModel noise;
    DetectorConfig detector;
    BaselineConfig baseline;
};

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg);

/// Throws ConfigError on missing files, malformed JSON, or invalid values.
ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace scenediff
