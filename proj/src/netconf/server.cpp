#include "capshare/netconf/server.hpp"

#include "capshare/netconf/rpc.hpp"
#include "capshare/xml/dom.hpp"

namespace capshare::netconf {

NetconfServer::NetconfServer(PolicyDatastore &store, ServerOptions options, Logger log)
    : store_(store), options_(std::move(options)), log_(std::move(log)) {}

NetconfServer::~NetconfServer() { stop(); }

void NetconfServer::start() {
    if (running_) return;
    listener_ = std::make_unique<TcpListener>(options_.host, options_.port);
    port_ = listener_->port();
    running_ = true;
    thread_ = std::thread([this] { accept_loop(); });
}

void NetconfServer::stop() {
    if (!running_.exchange(false)) return;
    listener_->close();
    {
        std::lock_guard lock(active_mutex_);
        if (active_ != nullptr) active_->shutdown();
    }
    if (thread_.joinable()) thread_.join();
}

void NetconfServer::accept_loop() {
    while (running_) {
        auto conn = listener_->accept(std::chrono::milliseconds(100));
        if (!conn) continue;
        {
            std::lock_guard lock(active_mutex_);
            active_ = conn.get();
        }
        // A session already shut down by stop() just fails its first read.
        if (!running_) conn->shutdown();
        serve(*conn);
        std::lock_guard lock(active_mutex_);
        active_ = nullptr;
    }
}

void NetconfServer::serve(ByteStream &stream) {
    const std::uint32_t id = next_session_id_++;
    ++sessions_;
    MessageChannel channel(stream);
    auto log = [&](const std::string &msg) {
        if (log_) log_("session " + std::to_string(id) + ": " + msg);
    };
    try {
        const auto session = negotiate_session(channel, Role::server, options_.capabilities, id);
        log(session.negotiated_version == NetconfVersion::v1_1 ? "established (base:1.1)"
                                                               : "established (base:1.0)");
        for (;;) {
            const std::string raw = channel.receive();
            xml::Element request;
            xml::Element reply;
            bool close = false;
            try {
                request = xml::parse(raw);
                reply = handle_rpc(store_, request);
                close = classify_rpc(request) == Operation::close_session;
            } catch (const xml::ParseError &e) {
                reply = make_error_reply(nullptr, {"rpc", "malformed-message", "error", e.what()});
            }
            if (auto err = reply_error(reply)) log("rpc-error " + err->tag + ": " + err->message);
            channel.send(xml::to_string(reply));
            if (close) {
                log("closed by client");
                return;
            }
        }
    } catch (const FramingError &e) {
        log(std::string("framing error, closing: ") + e.what());
    } catch (const SessionError &e) {
        log(e.what());
    } catch (const TransportError &e) {
        log(e.what());
    }
}

} // namespace capshare::netconf
