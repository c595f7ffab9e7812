#pragma once

#include <span>
#include <string>
#include <vector>

#include "capshare/nrm/types.hpp"

namespace capshare::nrm {

/// Served rate per tenant for one scheduling interval.
///
/// Each tenant gets min(offered, effective share of the cell, MCBR). The
/// effective share is the dedicated ratio itself while the ratios fit in the
/// cell; once they sum past 100% every ratio is scaled down by 100/sum.
/// Unused dedicated capacity is not handed to other tenants.
std::vector<double> allocate_capacity(std::span<const double> offered_mbps,
                                      std::span<const RRMPolicyRatio> ratios,
                                      const CellConfig &cell,
                                      std::span<const TenantSla> slas);

/// Effective percentage each ratio maps to after over-subscription scaling.
std::vector<double> effective_ratios(std::span<const RRMPolicyRatio> ratios);

double throughput_from_volume(double volume_mbit, double delta_t_s);

// Empty result means the scenario is usable.
std::vector<std::string> validate_scenario(const ScenarioConfig &config);

} // namespace capshare::nrm
