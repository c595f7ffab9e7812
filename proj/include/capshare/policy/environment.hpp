#pragma once

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "capshare/netconf/datastore.hpp"
#include "capshare/nrm/types.hpp"
#include "capshare/odu/simulator.hpp"
#include "capshare/odu/traffic.hpp"
#include "capshare/pm/report.hpp"

namespace capshare::policy {

struct EnvironmentOptions {
    nrm::ScenarioConfig scenario;
    std::vector<odu::TrafficProfile> profiles;
    long episode_steps = 480;
    // Per-episode load pattern variation: each tenant's curve is scaled by a
    // factor drawn from [min_scale, max_scale] and the episode starts at a
    // random period of the week.
    bool vary_loads = true;
    double min_scale = 0.8;
    double max_scale = 1.2;
    // Initial ratios are offset by up to this many action steps either way.
    int initial_ratio_jitter = 3;
};

/// In-process stand-in for the O1 loop: drives the O-DU step function
/// directly and hands back the PM report the rApp would have fetched, plus
/// the simulator's ground truth for reward computation.
class CapacitySharingEnv {
public:
    struct Observation {
        pm::PmReport report;
        odu::StepRecord truth;
    };

    explicit CapacitySharingEnv(EnvironmentOptions options);

    /// Starts an episode and runs its first period at the initial ratios.
    Observation reset(std::mt19937_64 &rng);
    /// Writes the ratios, simulates one period and returns its report.
    Observation step(std::span<const nrm::RRMPolicyRatio> ratios);

    bool episode_over() const { return steps_in_episode_ >= options_.episode_steps; }
    const nrm::ScenarioConfig &scenario() const { return options_.scenario; }
    const EnvironmentOptions &options() const { return options_; }

private:
    EnvironmentOptions options_;
    std::unique_ptr<netconf::PolicyDatastore> store_;
    std::unique_ptr<odu::OduSimulator> sim_;
    long steps_in_episode_ = 0;
};

} // namespace capshare::policy
