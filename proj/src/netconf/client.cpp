#include "capshare/netconf/client.hpp"

namespace capshare::netconf {

NetconfClient::NetconfClient(std::unique_ptr<ByteStream> stream,
                             std::vector<std::string> capabilities)
    : stream_(std::move(stream)), channel_(*stream_) {
    session_ = negotiate_session(channel_, Role::client, capabilities);
}

NetconfClient::~NetconfClient() {
    try {
        close();
    } catch (...) {
    }
}

std::unique_ptr<NetconfClient> NetconfClient::connect(const std::string &host,
                                                      std::uint16_t port,
                                                      std::chrono::milliseconds timeout,
                                                      std::vector<std::string> capabilities) {
    auto stream = connect_tcp(host, port, timeout);
    stream->set_read_timeout(timeout);
    return std::make_unique<NetconfClient>(std::move(stream), std::move(capabilities));
}

xml::Element NetconfClient::call(const xml::Element &rpc) {
    if (session_.state != SessionState::established) throw SessionError("session is not established");
    const auto id = rpc.attribute("message-id");
    channel_.send(xml::to_string(rpc));
    auto reply = xml::parse(channel_.receive());
    if (reply.ns != kNetconfNs || reply.name != "rpc-reply")
        throw SessionError("expected <rpc-reply>, got <" + reply.name + ">");
    if (reply.attribute("message-id") != id)
        throw SessionError("rpc-reply message-id does not match the request");
    return reply;
}

void NetconfClient::edit_config(std::span<const nrm::RRMPolicyRatio> policies) {
    const auto reply = call(build_edit_config(policies));
    if (auto err = reply_error(reply)) throw RpcFailure(*err);
    if (reply.child(kNetconfNs, "ok") == nullptr) throw SessionError("edit-config reply without <ok/>");
}

std::vector<nrm::RRMPolicyRatio> NetconfClient::get_config(std::optional<nrm::SNssai> filter) {
    const auto reply = call(build_get_config(new_message_id(), filter));
    if (auto err = reply_error(reply)) throw RpcFailure(*err);
    const auto *data = reply.child(kNetconfNs, "data");
    if (data == nullptr) throw SessionError("get-config reply without <data>");
    return parse_policy_ratios(*data);
}

void NetconfClient::close() {
    if (session_.state != SessionState::established) return;
    try {
        const auto reply = call(build_close_session(new_message_id()));
        session_.state = SessionState::closed;
        if (auto err = reply_error(reply)) throw RpcFailure(*err);
    } catch (...) {
        session_.state = SessionState::closed;
        throw;
    }
}

} // namespace capshare::netconf
