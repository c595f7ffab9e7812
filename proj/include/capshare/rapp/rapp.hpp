#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "capshare/netconf/client.hpp"
#include "capshare/nrm/types.hpp"
#include "capshare/pm/notification.hpp"
#include "capshare/pm/transfer.hpp"
#include "capshare/policy/policy.hpp"

namespace httplib {
class Server;
}

namespace capshare::rapp {

struct CellEndpoint {
    std::string cell_id = "1";
    std::string netconf_host = "127.0.0.1";
    std::uint16_t netconf_port = 8300;
    // Notifications whose file_location starts with this belong to the cell.
    std::string pm_base_url = "http://127.0.0.1:8301";
};

struct RappConfig {
    nrm::ScenarioConfig scenario = nrm::reference_scenario();
    std::vector<CellEndpoint> cells{CellEndpoint{}};
    std::string callback_host = "127.0.0.1";
    std::uint16_t callback_port = 8302;
    std::string callback_path = "/notify";
    // Keep one NETCONF session open instead of one session per period.
    bool keep_alive = false;
    std::chrono::milliseconds netconf_timeout{5000};
    std::chrono::milliseconds fetch_timeout{5000};
    // Warn when no notification arrives for this long (default 2 periods).
    std::chrono::milliseconds watchdog{2 * 180 * 1000};

    std::vector<std::string> violations() const;
};

using WallTime = std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;
WallTime wall_now();

enum class LoopStatus { ok, fetch_failed, parse_failed, rpc_error, transport_error };
std::string_view to_string(LoopStatus s);

/// One pass of the control loop for one cell, with the wall-clock instants
/// of each stage.
struct LoopRecord {
    std::string cell_id;
    std::int64_t step = 0;
    std::string file_location;
    LoopStatus status = LoopStatus::ok;
    std::string message;
    WallTime notification_received{};
    std::optional<WallTime> file_fetched;
    std::optional<WallTime> state_computed;
    std::optional<WallTime> inference_done;
    std::optional<WallTime> edit_config_sent;
    std::optional<WallTime> rpc_reply_received;
    std::vector<nrm::RRMPolicyRatio> ratios;

    bool timestamps_monotone() const;
    /// One JSON object on a single line.
    std::string to_json() const;
};

LoopRecord parse_loop_record(std::string_view line);

/// FIFO of file-ready notifications for one cell. A location already queued,
/// or the one most recently handed out, is dropped as a duplicate.
class NotificationQueue {
public:
    /// False if coalesced into an existing item.
    bool push(const pm::FileReadyNotification &n);
    std::optional<pm::FileReadyNotification> pop(std::chrono::milliseconds timeout);
    std::size_t size() const;
    void close();

private:
    mutable std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<pm::FileReadyNotification> items_;
    std::string last_popped_;
    bool closed_ = false;
};

/// HTTP endpoint receiving notifyFileReady POSTs. `route` returns the HTTP
/// status to answer with; malformed bodies get 400 without reaching it.
class CallbackListener {
public:
    using Route = std::function<int(const pm::FileReadyNotification &)>;

    CallbackListener(std::string host, std::uint16_t port, std::string path, Route route);
    ~CallbackListener();
    void start();
    void stop();
    std::uint16_t port() const { return port_; }

private:
    std::string host_;
    std::uint16_t port_;
    std::string path_;
    Route route_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

struct UpdateResult {
    LoopStatus status = LoopStatus::ok;
    bool sent = false;
    std::string message;
    std::optional<WallTime> sent_at;
    std::optional<WallTime> reply_at;
};

/// NETCONF side of one cell.
class PolicyUpdater {
public:
    PolicyUpdater(std::string host, std::uint16_t port, bool keep_alive,
                  std::chrono::milliseconds timeout);

    /// One edit-config with every ratio. An empty list sends nothing. A
    /// transport failure is retried once on a fresh session.
    UpdateResult push(std::span<const nrm::RRMPolicyRatio> ratios);
    /// get-config on the running datastore.
    std::vector<nrm::RRMPolicyRatio> read_current();
    std::uint64_t sessions_opened() const { return sessions_; }

private:
    netconf::NetconfClient &session();
    void drop_session();

    std::string host_;
    std::uint16_t port_;
    bool keep_alive_;
    std::chrono::milliseconds timeout_;
    std::unique_ptr<netconf::NetconfClient> client_;
    std::uint64_t sessions_ = 0;
};

/// Algorithm body for one cell: fetch, featurize, infer, configure.
class CellController {
public:
    CellController(nrm::ScenarioConfig scenario, CellEndpoint endpoint,
                   const policy::TrainedPolicy &policy, const RappConfig &config);

    /// Reads the datastore's current ratios. Tenants missing there start from
    /// their configured initial ratio.
    void initialize();
    LoopRecord handle(const pm::FileReadyNotification &n, WallTime received);

    const CellEndpoint &endpoint() const { return endpoint_; }
    const std::vector<nrm::RRMPolicyRatio> &current_ratios() const { return current_; }
    PolicyUpdater &updater() { return updater_; }

private:
    nrm::ScenarioConfig scenario_;
    CellEndpoint endpoint_;
    const policy::TrainedPolicy &policy_;
    pm::HttpFileRetriever retriever_;
    PolicyUpdater updater_;
    std::vector<nrm::RRMPolicyRatio> current_;
    std::int64_t step_ = 0;
};

/// The rApp process body: listener plus one control thread per cell.
class Rapp {
public:
    using Sink = std::function<void(const LoopRecord &)>;

    /// Throws nrm::ConfigurationError if the config is invalid or a tenant has
    /// no policy.
    Rapp(RappConfig config, policy::TrainedPolicy policy, Sink sink = {});
    ~Rapp();

    /// Connects to every cell (startup get-config) and opens the callback endpoint.
    void start();
    /// Blocks until `stop_flag` is set or, if max_periods >= 0, every cell
    /// has processed that many notifications.
    void run(const std::atomic<bool> &stop_flag, long max_periods = -1);
    void stop();
    std::uint16_t callback_port() const;
    std::vector<LoopRecord> records() const;

private:
    void cell_loop(std::size_t index, const std::atomic<bool> &stop_flag, long max_periods);

    RappConfig config_;
    policy::TrainedPolicy policy_;
    Sink sink_;
    std::vector<std::unique_ptr<CellController>> cells_;
    std::vector<std::unique_ptr<NotificationQueue>> queues_;
    std::unique_ptr<CallbackListener> listener_;
    mutable std::mutex records_mutex_;
    std::vector<LoopRecord> records_;
};

} // namespace capshare::rapp
