#include "capshare/policy/environment.hpp"

#include <algorithm>

#include "capshare/nrm/allocation.hpp"

namespace capshare::policy {

CapacitySharingEnv::CapacitySharingEnv(EnvironmentOptions options) : options_(std::move(options)) {
    if (options_.profiles.size() != options_.scenario.tenants.size())
        throw nrm::ConfigurationError("environment needs one traffic profile per tenant");
    if (auto v = nrm::validate_scenario(options_.scenario); !v.empty())
        throw nrm::ConfigurationError("invalid scenario: " + v.front());
    if (options_.episode_steps <= 0)
        throw nrm::ConfigurationError("episode length must be positive");
}

CapacitySharingEnv::Observation CapacitySharingEnv::reset(std::mt19937_64 &rng) {
    const auto &scenario = options_.scenario;
    auto profiles = options_.profiles;
    long start_step = 0;
    if (options_.vary_loads) {
        std::uniform_real_distribution<double> scale(options_.min_scale, options_.max_scale);
        for (auto &p : profiles) p.scale(scale(rng));
        const long periods_per_week = long(odu::kSecondsPerWeek) / scenario.delta_t_s;
        std::uniform_int_distribution<long> start(0, periods_per_week - 1);
        start_step = start(rng);
    }

    auto initial = scenario.initial_ratios();
    if (options_.initial_ratio_jitter > 0) {
        std::uniform_int_distribution<int> jitter(-options_.initial_ratio_jitter,
                                                  options_.initial_ratio_jitter);
        for (auto &r : initial)
            r.dedicated_ratio =
                std::clamp(r.dedicated_ratio + jitter(rng) * scenario.action_step_pct, 0, 100);
    }

    store_ = std::make_unique<netconf::PolicyDatastore>();
    store_->write(initial);
    sim_ = std::make_unique<odu::OduSimulator>(scenario, std::move(profiles), *store_, rng(),
                                               pm::TimePoint{});
    sim_->clock().steps = start_step;
    steps_in_episode_ = 0;

    Observation obs;
    obs.truth = sim_->step();
    obs.report = sim_->take_report();
    return obs;
}

CapacitySharingEnv::Observation
CapacitySharingEnv::step(std::span<const nrm::RRMPolicyRatio> ratios) {
    if (!sim_) throw std::logic_error("CapacitySharingEnv::step before reset");
    if (!store_->write(ratios)) throw nrm::ConfigurationError("ratio outside [0,100]");
    Observation obs;
    obs.truth = sim_->step();
    obs.report = sim_->take_report();
    ++steps_in_episode_;
    return obs;
}

} // namespace capshare::policy
