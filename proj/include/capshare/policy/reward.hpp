#pragma once

#include "capshare/nrm/types.hpp"

namespace capshare::policy {

inline constexpr double kSatisfactionTolerance = 1e-6;
inline constexpr double kDefaultOverprovisionWeight = 0.5;

/// SLA satisfaction minus an overprovisioning penalty.
///
/// sat is 1 when the tenant received min(offered, SAGBR), otherwise the
/// fraction of it that was served. over is the assigned capacity in excess of
/// what the tenant used or asked for, as a fraction of the cell. The result
/// lies in (-weight, 1].
double compute_reward(double served_mbps, double offered_mbps, double assigned_mbps,
                      const nrm::TenantSla &sla, const nrm::CellConfig &cell,
                      double overprovision_weight = kDefaultOverprovisionWeight);

} // namespace capshare::policy
