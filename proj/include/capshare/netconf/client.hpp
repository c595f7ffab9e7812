#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "capshare/netconf/rpc.hpp"
#include "capshare/netconf/session.hpp"
#include "capshare/netconf/transport.hpp"

namespace capshare::netconf {

class RpcFailure : public std::runtime_error {
public:
    explicit RpcFailure(RpcError e)
        : std::runtime_error("rpc-error " + e.tag + ": " + e.message), error(std::move(e)) {}
    RpcError error;
};

/// Single-session NETCONF client.
class NetconfClient {
public:
    /// Takes ownership of a connected stream and negotiates the session.
    explicit NetconfClient(std::unique_ptr<ByteStream> stream,
                           std::vector<std::string> capabilities = default_capabilities());
    ~NetconfClient();
    NetconfClient(const NetconfClient &) = delete;
    NetconfClient &operator=(const NetconfClient &) = delete;

    static std::unique_ptr<NetconfClient>
    connect(const std::string &host, std::uint16_t port,
            std::chrono::milliseconds timeout = std::chrono::seconds(5),
            std::vector<std::string> capabilities = default_capabilities());

    const NetconfSession &session() const { return session_; }

    /// Throws RpcFailure on an rpc-error reply.
    void edit_config(std::span<const nrm::RRMPolicyRatio> policies);
    std::vector<nrm::RRMPolicyRatio> get_config(std::optional<nrm::SNssai> filter = std::nullopt);
    /// Sends close-session and waits for the reply. Idempotent.
    void close();

    /// Sends an arbitrary <rpc> and returns the parsed reply.
    xml::Element call(const xml::Element &rpc);

private:
    std::unique_ptr<ByteStream> stream_;
    MessageChannel channel_;
    NetconfSession session_;
};

} // namespace capshare::netconf
