#include "capshare/odu/simulator.hpp"

#include "capshare/nrm/allocation.hpp"

namespace capshare::odu {

OduSimulator::OduSimulator(nrm::ScenarioConfig scenario, std::vector<TrafficProfile> profiles,
                           netconf::PolicyDatastore &store, std::uint64_t seed,
                           pm::TimePoint epoch)
    : scenario_(std::move(scenario)), profiles_(std::move(profiles)), store_(store), rng_(seed),
      epoch_(epoch) {
    if (profiles_.size() != scenario_.tenants.size())
        throw nrm::ConfigurationError("one traffic profile per tenant is required");
    if (auto v = nrm::validate_scenario(scenario_); !v.empty())
        throw nrm::ConfigurationError("invalid scenario: " + v.front());
    clock_.delta_t_s = scenario_.delta_t_s;
    acc_.resize(scenario_.tenants.size());
}

std::vector<nrm::RRMPolicyRatio> OduSimulator::current_ratios() const {
    std::vector<nrm::RRMPolicyRatio> out;
    out.reserve(scenario_.tenants.size());
    for (const auto &t : scenario_.tenants)
        out.push_back({t.snssai, store_.ratio(t.snssai).value_or(0)});
    return out;
}

StepRecord OduSimulator::step() {
    std::vector<double> offered;
    offered.reserve(profiles_.size());
    for (const auto &p : profiles_)
        offered.push_back(offered_load(p, clock_.t_s(), scenario_.cell.capacity_mbps, rng_));
    return step_with_offered(offered);
}

StepRecord OduSimulator::step_with_offered(std::span<const double> offered_mbps) {
    const auto &cell = scenario_.cell;
    StepRecord rec;
    rec.step = clock_.steps;
    rec.t_s = clock_.t_s();
    rec.ratios = current_ratios();
    rec.offered_mbps.assign(offered_mbps.begin(), offered_mbps.end());
    const auto slas = scenario_.slas();
    rec.served_mbps = nrm::allocate_capacity(rec.offered_mbps, rec.ratios, cell, slas);

    const double dt = scenario_.delta_t_s;
    for (std::size_t k = 0; k < acc_.size(); ++k) {
        rec.assigned_mbps.push_back(rec.ratios[k].dedicated_ratio * cell.capacity_mbps / 100.0);
        acc_[k].volume_mbit += rec.served_mbps[k] * dt;
        acc_[k].prb_integral += cell.total_prb * rec.served_mbps[k] / cell.capacity_mbps;
    }
    ++pending_steps_;
    ++clock_.steps;
    return rec;
}

pm::PmReport OduSimulator::take_report() {
    if (pending_steps_ == 0)
        throw PreconditionError("publish_pm: no completed step since the last report");

    pm::PmReport report;
    report.cell_id = scenario_.cell.cell_id;
    report.granularity_s = pending_steps_ * scenario_.delta_t_s;
    report.begin_time =
        epoch_ + std::chrono::seconds(std::int64_t(clock_.steps - pending_steps_) *
                                      scenario_.delta_t_s);
    report.dl_total_available_prb = scenario_.cell.total_prb;
    for (std::size_t k = 0; k < acc_.size(); ++k) {
        report.slices.push_back({scenario_.tenants[k].snssai,
                                 acc_[k].prb_integral / pending_steps_, acc_[k].volume_mbit});
        acc_[k] = {};
    }
    pending_steps_ = 0;
    return report;
}

} // namespace capshare::odu
