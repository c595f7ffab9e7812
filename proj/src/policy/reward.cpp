#include "capshare/policy/reward.hpp"

#include <algorithm>

namespace capshare::policy {

double compute_reward(double served_mbps, double offered_mbps, double assigned_mbps,
                      const nrm::TenantSla &sla, const nrm::CellConfig &cell,
                      double overprovision_weight) {
    const double required = std::min(offered_mbps, sla.sagbr_mbps);
    const double sat = served_mbps >= required - kSatisfactionTolerance
                           ? 1.0
                           : served_mbps / std::max(required, kSatisfactionTolerance);
    const double over =
        std::max(0.0, assigned_mbps - std::max(served_mbps, offered_mbps)) / cell.capacity_mbps;
    return sat - overprovision_weight * over;
}

} // namespace capshare::policy
