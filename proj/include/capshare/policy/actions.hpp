#pragma once

#include <random>
#include <span>
#include <vector>

#include "capshare/nrm/types.hpp"

namespace capshare::policy {

using Rng = std::mt19937_64;

/// Ratio deltas (percentage points) indexed by Q-network output.
struct ActionSet {
    std::vector<int> deltas;

    // {-step, 0, +step}
    static ActionSet three(int step);
    // {-4s, -3s, -2s, -s, 0, s, 2s, 3s, 4s}
    static ActionSet nine(int step);

    std::size_t size() const { return deltas.size(); }
    int max_abs_delta() const;
    // Contains 0 and is symmetric around it.
    bool valid() const;

    bool operator==(const ActionSet &) const = default;
};

/// Greedy with probability 1 - epsilon (ties go to the lowest index), uniform
/// otherwise. The RNG is only consulted when epsilon > 0.
std::size_t select_action(std::span<const double> qvalues, double epsilon, Rng &rng);

/// Highest ratio a tenant may be given: min(100, round(100 * MCBR / capacity)).
int ratio_ceiling(const nrm::TenantSla &sla, const nrm::CellConfig &cell);

nrm::RRMPolicyRatio apply_action(const nrm::RRMPolicyRatio &ratio, int delta_pct,
                                 const nrm::TenantSla &sla, const nrm::CellConfig &cell);

} // namespace capshare::policy
