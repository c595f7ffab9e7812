#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "capshare/odu/service.hpp"
#include "capshare/odu/traffic.hpp"
#include "capshare/policy/trainer.hpp"
#include "capshare/rapp/rapp.hpp"

namespace capshare::config {

struct TrainingConfig {
    policy::TrainingOptions options;
    long episode_steps = 480;
    bool vary_loads = true;
    double min_load_scale = 0.8;
    double max_load_scale = 1.2;
    int initial_ratio_jitter = 3;
};

struct MonitorConfig {
    // Leading steps left out of the metrics (0 counts every step).
    long warmup_steps = 0;
};

/// Everything one run needs; the O-DU, rApp, trainer and bench read the
/// sections they care about.
struct BenchConfig {
    nrm::ScenarioConfig scenario = nrm::reference_scenario();
    // Named curves in addition to the built-in ones ("embb", "fwa", "flat:<x>").
    std::map<std::string, odu::TrafficProfile> profiles;
    odu::OduServiceOptions odu;
    rapp::RappConfig rapp;
    TrainingConfig training;
    MonitorConfig monitor;

    /// Traffic profile of each tenant, in scenario order.
    std::vector<odu::TrafficProfile> tenant_profiles() const;
    policy::EnvironmentOptions environment() const;
};

/// Parses the JSON config. Missing keys keep their defaults; unknown keys are
/// rejected so typos surface. Throws nrm::ConfigurationError.
BenchConfig parse_config(std::string_view json_text);
BenchConfig load_config(const std::filesystem::path &path);
std::string to_json(const BenchConfig &config);

} // namespace capshare::config
