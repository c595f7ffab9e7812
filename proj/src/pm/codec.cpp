#include "capshare/pm/codec.hpp"

#include <charconv>
#include <map>
#include <optional>

#include "capshare/xml/dom.hpp"

namespace capshare::pm {

namespace {

constexpr std::string_view kCellPrefix = "NRCellDU=";
constexpr std::string_view kSlicePart = ",SNSSAI=";

std::string format_number(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_number(const std::string &text, std::string_view what) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size())
        throw PmFormatError("invalid value '" + text + "' for " + std::string(what));
    return v;
}

xml::Element el(std::string name, std::string text = {}) {
    return xml::Element(kMeasCollecNs, std::move(name), std::move(text));
}

// "PT<n>S"
int parse_duration(const std::string &text) {
    if (text.size() < 4 || text.rfind("PT", 0) != 0 || text.back() != 'S')
        throw PmFormatError("unsupported granularity period '" + text + "'");
    int v = 0;
    const char *b = text.data() + 2, *e = text.data() + text.size() - 1;
    const auto [end, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || end != e) throw PmFormatError("unsupported granularity period '" + text + "'");
    return v;
}

} // namespace

std::string serialize_pm_report(const PmReport &report) {
    if (auto v = report.violations(); !v.empty())
        throw PmFormatError("refusing to serialize PM report: " + v.front());

    xml::Element root = el("measCollecFile");
    auto &header = root.add(el("fileHeader"));
    header.set_attribute("fileFormatVersion", "32.435 V10.0");
    header.set_attribute("vendorName", "capshare");
    header.add(el("measCollec")).set_attribute("beginTime", format_iso8601(report.begin_time));

    auto &data = root.add(el("measData"));
    data.add(el("managedElement")).set_attribute("localDn", std::string(kCellPrefix) + report.cell_id);
    auto &info = data.add(el("measInfo"));
    info.set_attribute("measInfoId", "capacity-sharing");
    auto &gran = info.add(el("granPeriod"));
    gran.set_attribute("duration", "PT" + std::to_string(report.granularity_s) + "S");
    gran.set_attribute("endTime", format_iso8601(report.end_time()));

    const std::string_view names[] = {kMeanDlPrbUsed, kDlTotalAvailablePrb, kDlPdcpPduDataVolume};
    for (int p = 1; p <= 3; ++p)
        info.add(el("measType", std::string(names[p - 1]))).set_attribute("p", std::to_string(p));

    const std::string cell_ldn = std::string(kCellPrefix) + report.cell_id;
    auto &cell = info.add(el("measValue"));
    cell.set_attribute("measObjLdn", cell_ldn);
    cell.add(el("r", format_number(report.dl_total_available_prb))).set_attribute("p", "2");

    for (const auto &s : report.slices) {
        auto &row = info.add(el("measValue"));
        row.set_attribute("measObjLdn", cell_ldn + std::string(kSlicePart) + std::to_string(s.snssai.id));
        row.add(el("r", format_number(s.mean_dl_prb_used))).set_attribute("p", "1");
        row.add(el("r", format_number(s.dl_pdcp_volume_mbit))).set_attribute("p", "3");
    }

    root.add(el("fileFooter"))
        .add(el("measCollec"))
        .set_attribute("endTime", format_iso8601(report.end_time()));
    return xml::to_string(root, {.declaration = true, .indent = true});
}

PmReport parse_pm_report(std::string_view document, std::vector<std::string> *warnings) {
    xml::Element root;
    try {
        root = xml::parse(document);
    } catch (const xml::ParseError &e) {
        throw PmFormatError(std::string("malformed PM file: ") + e.what());
    }
    auto warn = [&](std::string msg) {
        if (warnings != nullptr) warnings->push_back(std::move(msg));
    };
    auto need = [](const xml::Element *e, const char *what) -> const xml::Element & {
        if (e == nullptr) throw PmFormatError(std::string("PM file lacks <") + what + ">");
        return *e;
    };
    auto attr = [](const xml::Element &e, const char *name) {
        auto v = e.attribute(name);
        if (!v) throw PmFormatError("<" + e.name + "> lacks attribute " + name);
        return *v;
    };

    if (root.ns != kMeasCollecNs || root.name != "measCollecFile")
        throw PmFormatError("not a measCollecFile document");

    PmReport report;
    const auto &header = need(root.child(kMeasCollecNs, "fileHeader"), "fileHeader");
    const auto &collec = need(header.child(kMeasCollecNs, "measCollec"), "measCollec");
    report.begin_time = parse_iso8601(attr(collec, "beginTime"));

    const auto &data = need(root.child(kMeasCollecNs, "measData"), "measData");
    const auto &info = need(data.child(kMeasCollecNs, "measInfo"), "measInfo");
    const auto &gran = need(info.child(kMeasCollecNs, "granPeriod"), "granPeriod");
    report.granularity_s = parse_duration(attr(gran, "duration"));

    // p -> measurement name, for the known types only.
    std::map<std::string, std::string> known;
    for (const auto *t : info.children_named(kMeasCollecNs, "measType")) {
        const auto name = t->trimmed_text();
        if (name == kMeanDlPrbUsed || name == kDlTotalAvailablePrb || name == kDlPdcpPduDataVolume)
            known[attr(*t, "p")] = name;
        else
            warn("ignoring measurement type '" + name + "'");
    }
    for (const auto required : {kMeanDlPrbUsed, kDlTotalAvailablePrb, kDlPdcpPduDataVolume}) {
        bool found = false;
        for (const auto &[p, n] : known) found = found || n == required;
        if (!found)
            throw PmFormatError("PM file lacks measurement type \"" + std::string(required) + "\"");
    }

    std::optional<double> available;
    std::optional<std::string> cell_id;
    for (const auto *row : info.children_named(kMeasCollecNs, "measValue")) {
        const auto ldn = attr(*row, "measObjLdn");
        if (ldn.rfind(kCellPrefix, 0) != 0) {
            warn("ignoring measured object '" + ldn + "'");
            continue;
        }
        const auto slice_at = ldn.rfind(kSlicePart);
        const std::string cell = ldn.substr(kCellPrefix.size(), slice_at == std::string::npos
                                                                   ? std::string::npos
                                                                   : slice_at - kCellPrefix.size());
        if (cell_id && *cell_id != cell)
            throw PmFormatError("PM file mixes cells '" + *cell_id + "' and '" + cell + "'");
        cell_id = cell;

        std::map<std::string, double> values;
        for (const auto *r : row->children_named(kMeasCollecNs, "r")) {
            const auto it = known.find(attr(*r, "p"));
            if (it == known.end()) continue;
            if (!values.emplace(it->second, parse_number(r->trimmed_text(), it->second)).second)
                throw PmFormatError("duplicate \"" + it->second + "\" in " + ldn);
        }

        if (slice_at == std::string::npos) {
            const auto it = values.find(std::string(kDlTotalAvailablePrb));
            if (it == values.end())
                throw PmFormatError("cell row lacks \"" + std::string(kDlTotalAvailablePrb) + "\"");
            available = it->second;
            continue;
        }
        const std::string id_text = ldn.substr(slice_at + kSlicePart.size());
        std::uint32_t id = 0;
        const auto [end, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
        if (id_text.empty() || ec != std::errc{} || end != id_text.data() + id_text.size())
            throw PmFormatError("invalid S-NSSAI in '" + ldn + "'");
        SliceMeasurements s;
        s.snssai = nrm::SNssai{id};
        for (const auto required : {kMeanDlPrbUsed, kDlPdcpPduDataVolume}) {
            const auto it = values.find(std::string(required));
            if (it == values.end())
                throw PmFormatError("slice " + id_text + " lacks \"" + std::string(required) + "\"");
            (required == kMeanDlPrbUsed ? s.mean_dl_prb_used : s.dl_pdcp_volume_mbit) = it->second;
        }
        report.slices.push_back(s);
    }
    if (!available)
        throw PmFormatError("PM file lacks a value for \"" + std::string(kDlTotalAvailablePrb) + "\"");
    report.dl_total_available_prb = *available;
    if (cell_id) {
        report.cell_id = *cell_id;
    } else if (const auto *me = data.child(kMeasCollecNs, "managedElement")) {
        const auto ldn = attr(*me, "localDn");
        if (ldn.rfind(kCellPrefix, 0) == 0) report.cell_id = ldn.substr(kCellPrefix.size());
    }
    if (auto v = report.violations(); !v.empty())
        throw PmFormatError("PM file violates report invariants: " + v.front());
    return report;
}

} // namespace capshare::pm
