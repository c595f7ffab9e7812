#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "capshare/sla/metrics.hpp"

namespace capshare::sla {

struct RunReport {
    std::vector<nrm::SNssai> tenants;
    std::vector<double> satisfaction;
    double utilization = 0.0;
    std::size_t steps = 0;
    // Set when a component failed before the requested duration elapsed.
    bool partial = false;
    std::string note;
    std::filesystem::path csv_path;
    std::filesystem::path metrics_path;
    std::vector<std::filesystem::path> plot_paths;
};

/// Both metrics for the series. Throws nrm::DomainError on an empty series.
RunReport compute_report(const SlaTimeSeries &series);

inline constexpr const char *kReportCsvHeader = "step,tenant,offered,served,assigned,satisfied";

/// One row per step and tenant; numbers in shortest round-trip form so the
/// metrics can be recomputed from the file exactly.
void write_report_csv(const SlaTimeSeries &series, std::ostream &out);
SlaTimeSeries read_report_csv(std::istream &in);

/// Offered load against assigned capacity for one tenant, as a percentage of
/// the cell capacity over time.
std::string render_plot_svg(const SlaTimeSeries &series, std::size_t tenant, double capacity_mbps,
                            double delta_t_s);

/// Writes series.csv, metrics.json and one plot per tenant into `out_dir`.
/// Throws std::filesystem::filesystem_error or std::runtime_error if the
/// directory is not writable and nrm::DomainError for an empty series.
RunReport emit_report(const SlaTimeSeries &series, const std::filesystem::path &out_dir,
                      double capacity_mbps, double delta_t_s, bool partial = false,
                      const std::string &note = {});

std::string metrics_json(const RunReport &report);

} // namespace capshare::sla
