#include "capshare/policy/policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace capshare::policy {

Eigen::VectorXd TenantPolicy::action_values(const StateVector &state) const {
    const auto input = normalization.apply(state);
    return network.forward(input);
}

std::size_t TenantPolicy::greedy_action(const StateVector &state) const {
    const Eigen::VectorXd q = action_values(state);
    std::mt19937_64 unused;
    return select_action(std::span<const double>(q.data(), std::size_t(q.size())), 0.0, unused);
}

const TenantPolicy *TrainedPolicy::find(nrm::SNssai id) const {
    auto it = std::find_if(tenants.begin(), tenants.end(),
                           [&](const TenantPolicy &p) { return p.snssai == id; });
    return it == tenants.end() ? nullptr : &*it;
}

std::vector<nrm::RRMPolicyRatio> decide_ratios(const TrainedPolicy &policy,
                                               const pm::PmReport &report,
                                               const nrm::ScenarioConfig &scenario,
                                               std::span<const nrm::RRMPolicyRatio> current) {
    if (current.size() != scenario.tenants.size())
        throw std::invalid_argument("decide_ratios: one current ratio per tenant is required");
    std::vector<nrm::RRMPolicyRatio> next;
    next.reserve(current.size());
    for (std::size_t k = 0; k < current.size(); ++k) {
        const auto &tenant = scenario.tenants[k];
        const auto *agent = policy.find(tenant.snssai);
        if (agent == nullptr)
            throw std::out_of_range("no policy for snssai " + std::to_string(tenant.snssai.id));
        const auto state =
            featurize(report, tenant.sla, current[k], scenario.cell, scenario.delta_t_s);
        const auto action = agent->greedy_action(state);
        next.push_back(
            apply_action(current[k], agent->actions.deltas.at(action), tenant.sla, scenario.cell));
    }
    return next;
}

} // namespace capshare::policy
