#include "capshare/odu/service.hpp"

#include <charconv>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "capshare/pm/codec.hpp"

namespace capshare::odu {

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
        throw std::runtime_error("series line " + std::to_string(line) + ": bad field '" + s + "'");
    return v;
}

} // namespace

void write_series_header(std::ostream &out) { out << kSeriesHeader << '\n'; }

void write_series_rows(std::ostream &out, const StepRecord &r) {
    for (std::size_t k = 0; k < r.ratios.size(); ++k)
        out << r.step << ',' << num(r.t_s) << ',' << r.ratios[k].snssai.id << ','
            << r.ratios[k].dedicated_ratio << ',' << num(r.offered_mbps[k]) << ','
            << num(r.served_mbps[k]) << ',' << num(r.assigned_mbps[k]) << '\n';
}

std::vector<StepRecord> read_series(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != kSeriesHeader)
        throw std::runtime_error("series file lacks the expected header");
    std::vector<StepRecord> out;
    int n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 7) throw std::runtime_error("series line " + std::to_string(n) + ": expected 7 fields");
        const auto step = field<std::int64_t>(f[0], n);
        if (out.empty() || out.back().step != step) {
            if (!out.empty() && step < out.back().step)
                throw std::runtime_error("series line " + std::to_string(n) + ": steps out of order");
            out.push_back(StepRecord{});
            out.back().step = step;
            out.back().t_s = field<double>(f[1], n);
        }
        auto &r = out.back();
        r.ratios.push_back({nrm::SNssai{field<std::uint32_t>(f[2], n)}, field<int>(f[3], n)});
        r.offered_mbps.push_back(field<double>(f[4], n));
        r.served_mbps.push_back(field<double>(f[5], n));
        r.assigned_mbps.push_back(field<double>(f[6], n));
    }
    return out;
}

OduService::OduService(nrm::ScenarioConfig scenario, std::vector<TrafficProfile> profiles,
                       std::uint64_t seed, OduServiceOptions options)
    : scenario_(scenario), options_(std::move(options)),
      sim_(std::move(scenario), std::move(profiles), store_, seed,
           pm::parse_iso8601(options_.epoch)),
      notifier_(options_.notify_url, options_.notify_timeout) {}

OduService::~OduService() { stop(); }

void OduService::start() {
    store_.write(scenario_.initial_ratios());
    netconf::ServerOptions nopt;
    nopt.host = options_.host;
    nopt.port = options_.netconf_port;
    netconf_ = std::make_unique<netconf::NetconfServer>(
        store_, nopt, [](const std::string &msg) { spdlog::debug("netconf {}", msg); });
    netconf_->start();
    pm_server_ = std::make_unique<pm::PmFileServer>(options_.host, options_.pm_port, options_.pm_dir);
    pm_server_->start();
    if (!options_.series_csv.empty()) {
        if (options_.series_csv.has_parent_path())
            std::filesystem::create_directories(options_.series_csv.parent_path());
        series_.open(options_.series_csv, std::ios::trunc);
        if (!series_) throw std::runtime_error("cannot write " + options_.series_csv.string());
        write_series_header(series_);
    }
    spdlog::info("odu cell {}: NETCONF on {}:{}, PM files on {}:{}", scenario_.cell.cell_id,
                 options_.host, netconf_->port(), options_.host, pm_server_->port());
}

void OduService::stop() {
    if (netconf_) netconf_->stop();
    if (pm_server_) pm_server_->stop();
    if (series_.is_open()) series_.flush();
}

std::uint16_t OduService::netconf_port() const { return netconf_ ? netconf_->port() : 0; }
std::uint16_t OduService::pm_port() const { return pm_server_ ? pm_server_->port() : 0; }

OduRunStats OduService::run(long steps, const std::atomic<bool> *stop_flag) {
    using clock = std::chrono::steady_clock;
    OduRunStats stats;
    auto stopped = [&] { return stop_flag != nullptr && stop_flag->load(); };

    if (options_.wait_for_consumer.count() > 0) {
        const auto deadline = clock::now() + options_.wait_for_consumer;
        while (netconf_->sessions_served() == 0 && clock::now() < deadline && !stopped())
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        if (netconf_->sessions_served() == 0)
            spdlog::warn("no NETCONF client connected within {} ms; starting anyway",
                         options_.wait_for_consumer.count());
    }

    const bool paced = options_.acceleration > 0.0;
    const auto period = std::chrono::duration<double>(scenario_.delta_t_s /
                                                      (paced ? options_.acceleration : 1.0));
    const auto t0 = clock::now();
    for (long i = 0; (steps < 0 || i < steps) && !stopped(); ++i) {
        auto record = sim_.step();
        ++stats.steps;
        if (series_.is_open()) {
            write_series_rows(series_, record);
            series_.flush();
        }
        records_.push_back(std::move(record));

        const auto report = sim_.take_report();
        const auto bytes = pm::serialize_pm_report(report);
        const auto note = pm_server_->publish(pm::pm_file_name(report), bytes, report.end_time());
        ++stats.reports;

        const auto seen = store_.revision();
        const auto delivery = notifier_.deliver(note);
        if (!delivery.delivered) {
            ++stats.notify_failures;
            spdlog::warn("step {}: file-ready notification failed: {}", i, delivery.error);
        } else if (!paced) {
            if (!store_.wait_for_revision_after(seen, options_.lockstep_timeout)) {
                ++stats.lockstep_timeouts;
                spdlog::warn("step {}: no edit-config within {} ms", i,
                             options_.lockstep_timeout.count());
            }
        }

        if (paced) {
            const auto due = t0 + std::chrono::duration_cast<clock::duration>(period * double(i + 1));
            while (clock::now() < due && !stopped())
                std::this_thread::sleep_for(
                    std::min<clock::duration>(due - clock::now(), std::chrono::milliseconds(50)));
        }
    }
    return stats;
}

} // namespace capshare::odu
