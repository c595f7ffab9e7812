#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace capshare::nrm {

class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Slice / tenant identifier (the <id> of an rRMPolicyRatio entry).
struct SNssai {
    std::uint32_t id = 0;

    auto operator<=>(const SNssai &) const = default;
};

// SAGBR is owed to the tenant whenever it asks for it; MCBR caps what a cell
// may hand out to it. Both in Mb/s.
struct TenantSla {
    double sagbr_mbps = 0.0;
    double mcbr_mbps = 0.0;

    bool operator==(const TenantSla &) const = default;
};

struct CellConfig {
    std::string cell_id;
    double capacity_mbps = 0.0;
    std::uint32_t total_prb = 0;

    bool operator==(const CellConfig &) const = default;
};

// Percentage of the cell's radio resources dedicated to one slice.
struct RRMPolicyRatio {
    SNssai snssai;
    int dedicated_ratio = 0;

    bool valid() const { return dedicated_ratio >= 0 && dedicated_ratio <= 100; }
    bool operator==(const RRMPolicyRatio &) const = default;
};

struct TenantConfig {
    SNssai snssai;
    TenantSla sla;
    int initial_ratio = 0;
    // Name of the offered-load profile driving this tenant in the simulator.
    std::string traffic_profile;
};

struct ScenarioConfig {
    CellConfig cell;
    std::vector<TenantConfig> tenants;
    int delta_t_s = 180;
    int action_step_pct = 3;

    std::vector<TenantSla> slas() const;
    std::vector<RRMPolicyRatio> initial_ratios() const;
    const TenantConfig *find_tenant(SNssai id) const;
};

// Scenario used throughout the evaluation: one 117 Mb/s cell shared by an
// eMBB tenant (60% guaranteed) and an FWA tenant (40% guaranteed).
ScenarioConfig reference_scenario();

} // namespace capshare::nrm
