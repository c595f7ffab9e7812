#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "capshare/netconf/datastore.hpp"
#include "capshare/netconf/server.hpp"
#include "capshare/odu/simulator.hpp"
#include "capshare/pm/transfer.hpp"

namespace capshare::odu {

inline constexpr std::string_view kEpochText = "2024-01-01T00:00:00Z";

struct OduServiceOptions {
    std::string host = "127.0.0.1";
    std::uint16_t netconf_port = 8300;
    std::uint16_t pm_port = 8301;
    std::string notify_url = "http://127.0.0.1:8302/notify";
    // 0 runs as fast as possible, waiting after each delivered notification
    // for the rApp's edit-config (lockstep). x > 0 runs x times faster than
    // real time without waiting.
    double acceleration = 0.0;
    std::chrono::milliseconds lockstep_timeout{5000};
    // Before the first step, wait up to this long for a NETCONF session.
    std::chrono::milliseconds wait_for_consumer{0};
    std::chrono::milliseconds notify_timeout{2000};
    std::filesystem::path pm_dir;     // mirror of published PM files, optional
    std::filesystem::path series_csv; // ground-truth series, optional
    std::string epoch{kEpochText};
};

struct OduRunStats {
    long steps = 0;
    long reports = 0;
    long notify_failures = 0;
    long lockstep_timeouts = 0;
};

/// Ground-truth series line format:
/// step,t_s,snssai,ratio,offered_mbps,served_mbps,assigned_mbps
inline constexpr const char *kSeriesHeader =
    "step,t_s,snssai,ratio,offered_mbps,served_mbps,assigned_mbps";

void write_series_header(std::ostream &out);
void write_series_rows(std::ostream &out, const StepRecord &record);
/// Parses a file written with the two functions above. Throws
/// std::runtime_error on malformed input.
std::vector<StepRecord> read_series(std::istream &in);

/// O-DU process body: NETCONF server over the policy datastore, PM file
/// server, and the stepping loop that publishes one PM file per period.
class OduService {
public:
    OduService(nrm::ScenarioConfig scenario, std::vector<TrafficProfile> profiles,
               std::uint64_t seed, OduServiceOptions options);
    ~OduService();

    /// Seeds the datastore with the scenario's initial ratios and starts both servers.
    void start();
    void stop();

    /// Runs `steps` periods (negative: until `stop_flag`). Returns early when
    /// `stop_flag` becomes true.
    OduRunStats run(long steps, const std::atomic<bool> *stop_flag = nullptr);

    netconf::PolicyDatastore &datastore() { return store_; }
    std::uint16_t netconf_port() const;
    std::uint16_t pm_port() const;
    const std::vector<StepRecord> &records() const { return records_; }

private:
    nrm::ScenarioConfig scenario_;
    OduServiceOptions options_;
    netconf::PolicyDatastore store_;
    OduSimulator sim_;
    std::unique_ptr<netconf::NetconfServer> netconf_;
    std::unique_ptr<pm::PmFileServer> pm_server_;
    pm::FileReadyNotifier notifier_;
    std::vector<StepRecord> records_;
    std::ofstream series_;
};

} // namespace capshare::odu
