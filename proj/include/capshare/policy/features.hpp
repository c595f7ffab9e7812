#pragma once

#include <array>
#include <stdexcept>

#include "capshare/nrm/types.hpp"
#include "capshare/pm/report.hpp"

namespace capshare::policy {

inline constexpr std::size_t kStateSize = 7;

/// Per-tenant observation, in order:
///   0 current dedicated ratio / 100
///   1 own PRB utilization
///   2 other tenants' PRB utilization
///   3 spare PRB fraction
///   4 throughput / SAGBR (capped at 2)
///   5 SAGBR / capacity
///   6 MCBR / capacity
using StateVector = std::array<double, kStateSize>;

inline constexpr double kThroughputFeatureCap = 2.0;

class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Builds tenant `ratio.snssai`'s state from one PM report. Every feature is
/// clamped to its range. Throws DegenerateInputError when the report carries
/// zero available PRBs or no row for the tenant.
StateVector featurize(const pm::PmReport &report, const nrm::TenantSla &sla,
                      const nrm::RRMPolicyRatio &ratio, const nrm::CellConfig &cell,
                      double delta_t_s);

/// Affine map applied to a StateVector before it reaches the Q-network.
struct FeatureNormalization {
    StateVector shift{};
    StateVector scale{};

    // Maps each feature's nominal range onto [-1, 1].
    static FeatureNormalization standard();

    StateVector apply(const StateVector &s) const;
    bool operator==(const FeatureNormalization &) const = default;
};

} // namespace capshare::policy
