#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "capshare/nrm/types.hpp"

namespace capshare::pm {

using TimePoint = std::chrono::sys_seconds;

// Measurement type names as they appear in the PM data file.
inline constexpr std::string_view kMeanDlPrbUsed = "Mean DL PRB used for data traffic";
inline constexpr std::string_view kDlTotalAvailablePrb = "DL total available PRB";
inline constexpr std::string_view kDlPdcpPduDataVolume = "DL PDCP PDU Data Volume";

class PmFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SliceMeasurements {
    nrm::SNssai snssai;
    double mean_dl_prb_used = 0.0;
    double dl_pdcp_volume_mbit = 0.0;

    bool operator==(const SliceMeasurements &) const = default;
};

/// One granularity period of per-cell, per-slice measurements.
struct PmReport {
    std::string cell_id;
    TimePoint begin_time{};
    int granularity_s = 0;
    double dl_total_available_prb = 0.0;
    std::vector<SliceMeasurements> slices;

    const SliceMeasurements *find(nrm::SNssai id) const;
    TimePoint end_time() const { return begin_time + std::chrono::seconds(granularity_s); }

    // Empty when the report can be serialized.
    std::vector<std::string> violations() const;

    bool operator==(const PmReport &) const = default;
};

std::string format_iso8601(TimePoint t);
std::string format_iso8601_basic(TimePoint t);
TimePoint parse_iso8601(std::string_view text);

/// `<cellId>_<beginTime>.xml` with the begin time in ISO 8601 basic format.
std::string pm_file_name(const PmReport &report);

} // namespace capshare::pm
