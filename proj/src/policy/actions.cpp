#include "capshare/policy/actions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace capshare::policy {

ActionSet ActionSet::three(int step) { return ActionSet{{-step, 0, step}}; }

ActionSet ActionSet::nine(int step) {
    ActionSet a;
    for (int i = -4; i <= 4; ++i) a.deltas.push_back(i * step);
    return a;
}

int ActionSet::max_abs_delta() const {
    int m = 0;
    for (int d : deltas) m = std::max(m, std::abs(d));
    return m;
}

bool ActionSet::valid() const {
    if (std::find(deltas.begin(), deltas.end(), 0) == deltas.end()) return false;
    for (int d : deltas)
        if (std::count(deltas.begin(), deltas.end(), -d) != std::count(deltas.begin(), deltas.end(), d))
            return false;
    return true;
}

std::size_t select_action(std::span<const double> qvalues, double epsilon, Rng &rng) {
    if (qvalues.empty()) throw std::invalid_argument("select_action: no action values");
    if (epsilon > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < epsilon) {
            std::uniform_int_distribution<std::size_t> pick(0, qvalues.size() - 1);
            return pick(rng);
        }
    }
    // max_element returns the first maximum, which is the tie-break we want.
    return std::size_t(std::max_element(qvalues.begin(), qvalues.end()) - qvalues.begin());
}

int ratio_ceiling(const nrm::TenantSla &sla, const nrm::CellConfig &cell) {
    const double bound = std::round(100.0 * sla.mcbr_mbps / cell.capacity_mbps);
    return int(std::clamp(bound, 0.0, 100.0));
}

nrm::RRMPolicyRatio apply_action(const nrm::RRMPolicyRatio &ratio, int delta_pct,
                                 const nrm::TenantSla &sla, const nrm::CellConfig &cell) {
    const int next = std::clamp(ratio.dedicated_ratio + delta_pct, 0, ratio_ceiling(sla, cell));
    return {ratio.snssai, next};
}

} // namespace capshare::policy
