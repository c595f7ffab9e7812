#include "capshare/sla/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace capshare::sla {

namespace {

std::string num(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

template <class T> T field(const std::string &s, int line) {
    T v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
        throw std::runtime_error("report line " + std::to_string(line) + ": bad field '" + s + "'");
    return v;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_file(const std::filesystem::path &p, const std::string &content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + p.string());
}

} // namespace

RunReport compute_report(const SlaTimeSeries &series) {
    RunReport r;
    r.tenants = series.tenants;
    r.steps = series.size();
    for (std::size_t k = 0; k < series.tenants.size(); ++k)
        r.satisfaction.push_back(satisfaction_ratio(series, k));
    r.utilization = capacity_utilization(series);
    return r;
}

void write_report_csv(const SlaTimeSeries &series, std::ostream &out) {
    out << kReportCsvHeader << '\n';
    for (std::size_t i = 0; i < series.size(); ++i)
        for (std::size_t k = 0; k < series.tenants.size(); ++k) {
            const auto &s = series.samples[i][k];
            out << series.steps[i] << ',' << series.tenants[k].id << ',' << num(s.offered_mbps) << ','
                << num(s.served_mbps) << ',' << num(s.assigned_mbps) << ',' << (s.satisfied ? 1 : 0)
                << '\n';
        }
}

SlaTimeSeries read_report_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != kReportCsvHeader)
        throw std::runtime_error("report CSV lacks the expected header");
    SlaTimeSeries series;
    int n = 1;
    bool tenants_known = false;
    std::size_t column = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 6) throw std::runtime_error("report line " + std::to_string(n) + ": expected 6 fields");
        const auto step = field<std::int64_t>(f[0], n);
        const nrm::SNssai tenant{field<std::uint32_t>(f[1], n)};
        if (series.steps.empty() || series.steps.back() != step) {
            if (!series.steps.empty()) {
                if (!tenants_known) tenants_known = true;
                if (column != series.tenants.size())
                    throw std::runtime_error("report line " + std::to_string(n) + ": step " +
                                             std::to_string(series.steps.back()) + " is incomplete");
            }
            series.steps.push_back(step);
            series.samples.emplace_back();
            column = 0;
        }
        if (!tenants_known) {
            series.tenants.push_back(tenant);
        } else if (column >= series.tenants.size() || series.tenants[column] != tenant) {
            throw std::runtime_error("report line " + std::to_string(n) + ": unexpected tenant " +
                                     std::to_string(tenant.id));
        }
        const int sat = field<int>(f[5], n);
        if (sat != 0 && sat != 1) throw std::runtime_error("report line " + std::to_string(n) + ": satisfied must be 0 or 1");
        series.samples.back().push_back(
            {field<double>(f[2], n), field<double>(f[3], n), field<double>(f[4], n), sat == 1});
        ++column;
    }
    if (!series.steps.empty() && column != series.tenants.size())
        throw std::runtime_error("report CSV ends with an incomplete step");
    return series;
}

std::string render_plot_svg(const SlaTimeSeries &series, std::size_t tenant, double capacity_mbps,
                            double delta_t_s) {
    constexpr double W = 960, H = 360, L = 60, R = 20, T = 40, B = 50;
    const double pw = W - L - R, ph = H - T - B;
    const std::size_t n = series.size();
    const double days = std::max(1e-9, double(n) * delta_t_s / 86400.0);
    auto x = [&](std::size_t i) { return L + pw * (double(i) * delta_t_s / 86400.0) / days; };
    auto y = [&](double pct) { return T + ph * (1.0 - std::clamp(pct, 0.0, 120.0) / 120.0); };

    auto line = [&](auto value, const char *colour, const char *dash) {
        std::string pts;
        for (std::size_t i = 0; i < n; ++i) {
            pts += fixed(x(i), 1) + "," + fixed(y(value(i)), 1);
            if (i + 1 < n) pts += ' ';
        }
        return std::string("  <polyline fill=\"none\" stroke=\"") + colour + "\" stroke-width=\"1.2\"" +
               (dash[0] != '\0' ? std::string(" stroke-dasharray=\"") + dash + "\"" : std::string{}) +
               " points=\"" + pts + "\"/>\n";
    };

    const auto id = std::to_string(series.tenants.at(tenant).id);
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(W, 0) +
                      "\" height=\"" + fixed(H, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "  <text x=\"" + fixed(L, 0) + "\" y=\"24\" font-size=\"14\">Tenant " + id +
           ": offered load vs rRMPolicyDedicatedRatio (% of cell capacity)</text>\n";
    for (int pct = 0; pct <= 120; pct += 20) {
        svg += "  <line x1=\"" + fixed(L, 1) + "\" x2=\"" + fixed(L + pw, 1) + "\" y1=\"" +
               fixed(y(pct), 1) + "\" y2=\"" + fixed(y(pct), 1) + "\" stroke=\"#ddd\"/>\n";
        svg += "  <text x=\"" + fixed(L - 8, 1) + "\" y=\"" + fixed(y(pct) + 4, 1) +
               "\" text-anchor=\"end\">" + std::to_string(pct) + "</text>\n";
    }
    for (int d = 0; d <= int(days); ++d) {
        const double xd = L + pw * double(d) / days;
        svg += "  <line x1=\"" + fixed(xd, 1) + "\" x2=\"" + fixed(xd, 1) + "\" y1=\"" + fixed(T, 1) +
               "\" y2=\"" + fixed(T + ph, 1) + "\" stroke=\"#eee\"/>\n";
        svg += "  <text x=\"" + fixed(xd, 1) + "\" y=\"" + fixed(T + ph + 18, 1) +
               "\" text-anchor=\"middle\">day " + std::to_string(d) + "</text>\n";
    }
    svg += "  <rect x=\"" + fixed(L, 1) + "\" y=\"" + fixed(T, 1) + "\" width=\"" + fixed(pw, 1) +
           "\" height=\"" + fixed(ph, 1) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg += line([&](std::size_t i) { return 100.0 * series.samples[i][tenant].offered_mbps / capacity_mbps; },
                "#1f77b4", "");
    svg += line([&](std::size_t i) { return 100.0 * series.samples[i][tenant].assigned_mbps / capacity_mbps; },
                "#d62728", "4 2");
    svg += "  <text x=\"" + fixed(L + pw - 200, 1) + "\" y=\"" + fixed(T + 16, 1) +
           "\" fill=\"#1f77b4\">offered load</text>\n";
    svg += "  <text x=\"" + fixed(L + pw - 100, 1) + "\" y=\"" + fixed(T + 16, 1) +
           "\" fill=\"#d62728\">dedicated ratio</text>\n";
    svg += "</svg>\n";
    return svg;
}

std::string metrics_json(const RunReport &report) {
    nlohmann::json sat = nlohmann::json::object();
    for (std::size_t k = 0; k < report.tenants.size(); ++k)
        sat[std::to_string(report.tenants[k].id)] = report.satisfaction[k];
    nlohmann::json j{{"steps", report.steps},
                     {"satisfaction_ratio", sat},
                     {"capacity_utilization", report.utilization},
                     {"partial", report.partial}};
    if (!report.note.empty()) j["note"] = report.note;
    return j.dump(2) + "\n";
}

RunReport emit_report(const SlaTimeSeries &series, const std::filesystem::path &out_dir,
                      double capacity_mbps, double delta_t_s, bool partial, const std::string &note) {
    auto report = compute_report(series);
    report.partial = partial;
    report.note = note;
    std::filesystem::create_directories(out_dir);

    report.csv_path = out_dir / "series.csv";
    std::ostringstream csv;
    write_report_csv(series, csv);
    write_file(report.csv_path, csv.str());

    for (std::size_t k = 0; k < series.tenants.size(); ++k) {
        auto p = out_dir / ("tenant_" + std::to_string(series.tenants[k].id) + ".svg");
        write_file(p, render_plot_svg(series, k, capacity_mbps, delta_t_s));
        report.plot_paths.push_back(p);
    }
    report.metrics_path = out_dir / "metrics.json";
    write_file(report.metrics_path, metrics_json(report));
    return report;
}

} // namespace capshare::sla
