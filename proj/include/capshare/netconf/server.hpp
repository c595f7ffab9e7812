#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "capshare/netconf/datastore.hpp"
#include "capshare/netconf/session.hpp"
#include "capshare/netconf/transport.hpp"

namespace capshare::netconf {

struct ServerOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 8300;
    std::vector<std::string> capabilities = default_capabilities();
};

/// Accepts sessions one after another on a background thread and serves
/// edit-config, get-config and close-session against `store`.
class NetconfServer {
public:
    using Logger = std::function<void(const std::string &)>;

    NetconfServer(PolicyDatastore &store, ServerOptions options, Logger log = {});
    ~NetconfServer();
    NetconfServer(const NetconfServer &) = delete;
    NetconfServer &operator=(const NetconfServer &) = delete;

    /// Binds and starts accepting. Throws TransportError if the port is taken.
    void start();
    void stop();
    std::uint16_t port() const { return port_; }
    std::uint64_t sessions_served() const { return sessions_.load(); }

    /// Runs one already-connected session to completion on the calling thread.
    void serve(ByteStream &stream);

private:
    void accept_loop();

    PolicyDatastore &store_;
    ServerOptions options_;
    Logger log_;
    std::unique_ptr<TcpListener> listener_;
    std::thread thread_;
    std::atomic<bool> running_{false};
    std::atomic<std::uint64_t> sessions_{0};
    std::atomic<std::uint32_t> next_session_id_{1};
    std::uint16_t port_ = 0;
    std::mutex active_mutex_;
    ByteStream *active_ = nullptr;
};

} // namespace capshare::netconf
