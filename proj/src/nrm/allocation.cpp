#include "capshare/nrm/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace capshare::nrm {

std::vector<TenantSla> ScenarioConfig::slas() const {
    std::vector<TenantSla> out;
    out.reserve(tenants.size());
    for (const auto &t : tenants) out.push_back(t.sla);
    return out;
}

std::vector<RRMPolicyRatio> ScenarioConfig::initial_ratios() const {
    std::vector<RRMPolicyRatio> out;
    out.reserve(tenants.size());
    for (const auto &t : tenants) out.push_back({t.snssai, t.initial_ratio});
    return out;
}

const TenantConfig *ScenarioConfig::find_tenant(SNssai id) const {
    auto it = std::find_if(tenants.begin(), tenants.end(),
                           [&](const TenantConfig &t) { return t.snssai == id; });
    return it == tenants.end() ? nullptr : &*it;
}

ScenarioConfig reference_scenario() {
    ScenarioConfig s;
    s.cell = CellConfig{"1", 117.0, 106};
    s.tenants = {
        TenantConfig{SNssai{1}, TenantSla{70.2, 93.6}, 60, "embb"},
        TenantConfig{SNssai{2}, TenantSla{46.8, 93.6}, 40, "fwa"},
    };
    s.delta_t_s = 180;
    s.action_step_pct = 3;
    return s;
}

std::vector<double> effective_ratios(std::span<const RRMPolicyRatio> ratios) {
    double total = 0.0;
    for (const auto &r : ratios) {
        if (!r.valid())
            throw ConfigurationError("rRMPolicyDedicatedRatio out of [0,100] for snssai " +
                                     std::to_string(r.snssai.id));
        total += r.dedicated_ratio;
    }
    std::vector<double> eff;
    eff.reserve(ratios.size());
    for (const auto &r : ratios) {
        double v = r.dedicated_ratio;
        if (total > 100.0) v = v * 100.0 / total;
        eff.push_back(v);
    }
    return eff;
}

std::vector<double> allocate_capacity(std::span<const double> offered_mbps,
                                      std::span<const RRMPolicyRatio> ratios,
                                      const CellConfig &cell,
                                      std::span<const TenantSla> slas) {
    if (offered_mbps.size() != ratios.size() || ratios.size() != slas.size())
        throw ConfigurationError("allocate_capacity: offered, ratios and slas differ in length");
    if (!(cell.capacity_mbps > 0.0))
        throw ConfigurationError("allocate_capacity: cell capacity must be positive");

    const auto eff = effective_ratios(ratios);
    std::vector<double> served(offered_mbps.size());
    for (std::size_t k = 0; k < served.size(); ++k) {
        if (!(offered_mbps[k] >= 0.0))
            throw DomainError("allocate_capacity: negative offered load");
        const double share = eff[k] * cell.capacity_mbps / 100.0;
        served[k] = std::min({offered_mbps[k], share, slas[k].mcbr_mbps});
    }
    return served;
}

double throughput_from_volume(double volume_mbit, double delta_t_s) {
    if (!(delta_t_s > 0.0)) throw DomainError("throughput_from_volume: delta_t must be positive");
    if (volume_mbit < 0.0) throw DomainError("throughput_from_volume: negative volume");
    return volume_mbit / delta_t_s;
}

std::vector<std::string> validate_scenario(const ScenarioConfig &config) {
    std::vector<std::string> violations;
    if (!(config.cell.capacity_mbps > 0.0)) violations.emplace_back("nonpositive cell capacity");
    if (config.cell.total_prb == 0) violations.emplace_back("nonpositive total PRB count");
    if (config.delta_t_s <= 0) violations.emplace_back("nonpositive granularity period");
    if (config.action_step_pct <= 0) violations.emplace_back("nonpositive action step");

    std::set<std::uint32_t> seen;
    int ratio_sum = 0;
    for (const auto &t : config.tenants) {
        const auto tag = " (snssai " + std::to_string(t.snssai.id) + ")";
        if (t.snssai.id == 0) violations.push_back("snssai id must be >= 1" + tag);
        if (!seen.insert(t.snssai.id).second) violations.push_back("duplicate snssai" + tag);
        if (!(t.sla.sagbr_mbps > 0.0)) violations.push_back("sagbr must be positive" + tag);
        if (t.sla.sagbr_mbps > t.sla.mcbr_mbps) violations.push_back("sagbr exceeds mcbr" + tag);
        if (config.cell.capacity_mbps > 0.0 && t.sla.mcbr_mbps > config.cell.capacity_mbps)
            violations.push_back("mcbr exceeds cell capacity" + tag);
        if (t.initial_ratio < 0 || t.initial_ratio > 100)
            violations.push_back("initial ratio outside [0,100]" + tag);
        ratio_sum += t.initial_ratio;
    }
    if (ratio_sum > 100) violations.emplace_back("sum of initial ratios exceeds 100");
    return violations;
}

} // namespace capshare::nrm
