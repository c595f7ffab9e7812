#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "capshare/nrm/types.hpp"
#include "capshare/odu/simulator.hpp"

namespace capshare::sla {

inline constexpr double kSatisfactionTolerance = 1e-6;

/// served >= min(offered, sagbr), with a small tolerance for float noise.
bool sla_satisfied(double served_mbps, double offered_mbps, double sagbr_mbps);

struct TenantSample {
    double offered_mbps = 0.0;
    double served_mbps = 0.0;
    double assigned_mbps = 0.0;
    bool satisfied = false;

    bool operator==(const TenantSample &) const = default;
};

struct SlaTimeSeries {
    std::vector<nrm::SNssai> tenants;
    std::vector<std::int64_t> steps;
    // samples[i][k]: step i, tenant k.
    std::vector<std::vector<TenantSample>> samples;

    std::size_t size() const { return steps.size(); }
    bool empty() const { return steps.empty(); }
    std::vector<std::string> violations(double capacity_mbps) const;
    bool operator==(const SlaTimeSeries &) const = default;
};

/// Marks each step with the satisfaction predicate for the scenario's SLAs.
SlaTimeSeries series_from_records(const nrm::ScenarioConfig &scenario,
                                  std::span<const odu::StepRecord> records);

/// Fraction of steps on which `tenant` (index into series.tenants) was
/// satisfied. Throws nrm::DomainError on an empty series.
double satisfaction_ratio(const SlaTimeSeries &series, std::size_t tenant);

/// Mean over steps with nonzero assigned capacity of
/// min(1, sum served / sum assigned). Throws nrm::DomainError if no step
/// qualifies.
double capacity_utilization(const SlaTimeSeries &series);

} // namespace capshare::sla
