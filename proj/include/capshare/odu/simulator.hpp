#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "capshare/netconf/datastore.hpp"
#include "capshare/nrm/types.hpp"
#include "capshare/odu/traffic.hpp"
#include "capshare/pm/report.hpp"

namespace capshare::odu {

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Virtual clock. Time is kept as a step count so it stays an exact multiple of
/// the granularity period.
struct SimClock {
    std::int64_t steps = 0;
    int delta_t_s = 180;
    // Wall seconds per virtual period; 0 runs as fast as possible.
    double acceleration = 0.0;

    double t_s() const { return double(steps) * delta_t_s; }
};

/// Ground truth for one simulated period.
struct StepRecord {
    std::int64_t step = 0;
    double t_s = 0.0;
    std::vector<nrm::RRMPolicyRatio> ratios;
    std::vector<double> offered_mbps;
    std::vector<double> served_mbps;
    // Nominal capacity behind each dedicated ratio (ratio * capacity / 100).
    std::vector<double> assigned_mbps;
};

/// The simulated O-DU: samples offered load, schedules it against the
/// dedicated ratios currently in the datastore and accumulates PM counters.
class OduSimulator {
public:
    OduSimulator(nrm::ScenarioConfig scenario, std::vector<TrafficProfile> profiles,
                 netconf::PolicyDatastore &store, std::uint64_t seed, pm::TimePoint epoch);

    /// One period with offered loads drawn from the traffic profiles.
    StepRecord step();
    /// One period with caller-supplied offered loads (no RNG draws).
    StepRecord step_with_offered(std::span<const double> offered_mbps);

    /// Builds the PM report for the periods since the last call and resets the
    /// accumulators. Throws PreconditionError when no period has elapsed.
    pm::PmReport take_report();

    /// Ratios in effect for the next step, in scenario tenant order. Tenants
    /// missing from the datastore get 0.
    std::vector<nrm::RRMPolicyRatio> current_ratios() const;

    const SimClock &clock() const { return clock_; }
    SimClock &clock() { return clock_; }
    const nrm::ScenarioConfig &scenario() const { return scenario_; }
    int steps_since_report() const { return pending_steps_; }

private:
    struct Accumulator {
        double volume_mbit = 0.0;
        double prb_integral = 0.0;
    };

    nrm::ScenarioConfig scenario_;
    std::vector<TrafficProfile> profiles_;
    netconf::PolicyDatastore &store_;
    Rng rng_;
    pm::TimePoint epoch_;
    SimClock clock_;
    std::vector<Accumulator> acc_;
    int pending_steps_ = 0;
};

} // namespace capshare::odu
