#pragma once

#include <span>
#include <vector>

#include "capshare/nrm/types.hpp"
#include "capshare/pm/report.hpp"
#include "capshare/policy/actions.hpp"
#include "capshare/policy/features.hpp"
#include "capshare/policy/qnetwork.hpp"

namespace capshare::policy {

inline constexpr int kPolicyFormatVersion = 1;

/// One tenant's learnt agent.
struct TenantPolicy {
    nrm::SNssai snssai;
    ActionSet actions;
    FeatureNormalization normalization = FeatureNormalization::standard();
    QNetwork network;

    Eigen::VectorXd action_values(const StateVector &state) const;
    std::size_t greedy_action(const StateVector &state) const;

    bool operator==(const TenantPolicy &) const = default;
};

struct TrainedPolicy {
    int version = kPolicyFormatVersion;
    std::vector<TenantPolicy> tenants;

    const TenantPolicy *find(nrm::SNssai id) const;
    bool operator==(const TrainedPolicy &) const = default;
};

/// Featurize each tenant from `report`, run its greedy policy and clamp the
/// resulting ratio. `current` is in scenario tenant order; so is the result.
/// Throws std::out_of_range if a tenant has no policy.
std::vector<nrm::RRMPolicyRatio> decide_ratios(const TrainedPolicy &policy,
                                               const pm::PmReport &report,
                                               const nrm::ScenarioConfig &scenario,
                                               std::span<const nrm::RRMPolicyRatio> current);

} // namespace capshare::policy
