#include "capshare/sla/metrics.hpp"

#include <algorithm>

namespace capshare::sla {

bool sla_satisfied(double served_mbps, double offered_mbps, double sagbr_mbps) {
    return served_mbps >= std::min(offered_mbps, sagbr_mbps) - kSatisfactionTolerance;
}

std::vector<std::string> SlaTimeSeries::violations(double capacity_mbps) const {
    std::vector<std::string> out;
    if (samples.size() != steps.size()) out.emplace_back("step index and samples differ in length");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() != tenants.size()) {
            out.push_back("step " + std::to_string(i) + " has the wrong tenant count");
            continue;
        }
        for (const auto &s : samples[i])
            if (s.assigned_mbps > capacity_mbps * (1.0 + 1e-12))
                out.push_back("step " + std::to_string(i) + " assigns more than the capacity");
    }
    return out;
}

SlaTimeSeries series_from_records(const nrm::ScenarioConfig &scenario,
                                  std::span<const odu::StepRecord> records) {
    SlaTimeSeries series;
    for (const auto &t : scenario.tenants) series.tenants.push_back(t.snssai);
    const std::size_t k = scenario.tenants.size();
    for (const auto &r : records) {
        if (r.offered_mbps.size() != k || r.served_mbps.size() != k || r.assigned_mbps.size() != k)
            throw nrm::ConfigurationError("step record does not match the scenario's tenants");
        std::vector<TenantSample> row;
        for (std::size_t j = 0; j < k; ++j)
            row.push_back({r.offered_mbps[j], r.served_mbps[j], r.assigned_mbps[j],
                           sla_satisfied(r.served_mbps[j], r.offered_mbps[j],
                                         scenario.tenants[j].sla.sagbr_mbps)});
        series.steps.push_back(r.step);
        series.samples.push_back(std::move(row));
    }
    return series;
}

double satisfaction_ratio(const SlaTimeSeries &series, std::size_t tenant) {
    if (series.empty()) throw nrm::DomainError("satisfaction ratio of an empty series");
    if (tenant >= series.tenants.size()) throw std::out_of_range("no such tenant index");
    std::size_t ok = 0;
    for (const auto &row : series.samples) ok += row.at(tenant).satisfied ? 1 : 0;
    return double(ok) / double(series.samples.size());
}

double capacity_utilization(const SlaTimeSeries &series) {
    double total = 0.0;
    std::size_t counted = 0;
    for (const auto &row : series.samples) {
        double served = 0.0, assigned = 0.0;
        for (const auto &s : row) {
            served += s.served_mbps;
            assigned += s.assigned_mbps;
        }
        if (assigned <= 0.0) continue;
        total += std::min(1.0, served / assigned);
        ++counted;
    }
    if (counted == 0) throw nrm::DomainError("capacity utilization with no assigned capacity");
    return total / double(counted);
}

} // namespace capshare::sla
