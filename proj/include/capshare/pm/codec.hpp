#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "capshare/pm/report.hpp"

namespace capshare::pm {

inline constexpr const char *kMeasCollecNs =
    "http://www.3gpp.org/ftp/specs/archive/32_series/32.435#measCollec";

/// measCollecFile XML. Numbers are written in shortest round-trip form, so
/// parse_pm_report(serialize_pm_report(r)) == r exactly. Throws PmFormatError
/// if the report violates its invariants.
std::string serialize_pm_report(const PmReport &report);

/// Measurement types other than the three known ones are skipped; a note for
/// each lands in `warnings` if given. Throws PmFormatError on malformed XML,
/// a missing required measurement type (named in the message) or values that
/// break the report invariants.
PmReport parse_pm_report(std::string_view document, std::vector<std::string> *warnings = nullptr);

} // namespace capshare::pm
