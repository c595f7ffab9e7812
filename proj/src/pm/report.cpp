#include "capshare/pm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace capshare::pm {

const SliceMeasurements *PmReport::find(nrm::SNssai id) const {
    auto it = std::find_if(slices.begin(), slices.end(),
                           [&](const SliceMeasurements &s) { return s.snssai == id; });
    return it == slices.end() ? nullptr : &*it;
}

std::vector<std::string> PmReport::violations() const {
    std::vector<std::string> out;
    if (cell_id.empty()) out.emplace_back("empty cell id");
    if (granularity_s <= 0) out.emplace_back("nonpositive granularity period");
    if (!std::isfinite(dl_total_available_prb) || dl_total_available_prb < 0.0)
        out.emplace_back("invalid DL total available PRB");

    std::set<std::uint32_t> ids;
    double used = 0.0;
    for (const auto &s : slices) {
        const auto tag = " (snssai " + std::to_string(s.snssai.id) + ")";
        if (!ids.insert(s.snssai.id).second) out.push_back("duplicate slice" + tag);
        if (!std::isfinite(s.mean_dl_prb_used) || s.mean_dl_prb_used < 0.0)
            out.push_back("invalid PRB usage" + tag);
        if (!std::isfinite(s.dl_pdcp_volume_mbit) || s.dl_pdcp_volume_mbit < 0.0)
            out.push_back("invalid data volume" + tag);
        used += s.mean_dl_prb_used;
    }
    // Per-slice usage is derived from served rates, so allow for rounding in the sum.
    if (used > dl_total_available_prb * (1.0 + 1e-9))
        out.emplace_back("PRB usage exceeds available PRB");
    return out;
}

namespace {

struct Civil {
    int year;
    unsigned month, day, hour, minute, second;
};

Civil to_civil(TimePoint t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    return {int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
            unsigned(hms.hours().count()), unsigned(hms.minutes().count()),
            unsigned(hms.seconds().count())};
}

} // namespace

std::string format_iso8601(TimePoint t) {
    const auto c = to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02uZ", c.year, c.month, c.day,
                  c.hour, c.minute, c.second);
    return buf;
}

std::string format_iso8601_basic(TimePoint t) {
    const auto c = to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d%02u%02uT%02u%02u%02uZ", c.year, c.month, c.day, c.hour,
                  c.minute, c.second);
    return buf;
}

TimePoint parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    const std::string s(text);
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, se = 0;
    char tail = 0;
    int n = 0;
    if (std::sscanf(s.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c%n", &y, &mo, &d, &h, &mi, &se, &tail,
                    &n) != 7 &&
        std::sscanf(s.c_str(), "%4d%2u%2uT%2u%2u%2u%c%n", &y, &mo, &d, &h, &mi, &se, &tail,
                    &n) != 7)
        throw PmFormatError("bad timestamp: " + s);
    if (tail != 'Z' || std::size_t(n) != s.size())
        throw PmFormatError("timestamp must be UTC (trailing Z): " + s);
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || se > 59) throw PmFormatError("bad timestamp: " + s);
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
}

std::string pm_file_name(const PmReport &report) {
    return report.cell_id + "_" + format_iso8601_basic(report.begin_time) + ".xml";
}

} // namespace capshare::pm
