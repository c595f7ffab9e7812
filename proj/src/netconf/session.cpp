#include "capshare/netconf/session.hpp"

#include <algorithm>
#include <charconv>

#include "capshare/xml/dom.hpp"

namespace capshare::netconf {

void MessageChannel::send(std::string_view message) {
    stream_.write_all(framing_ == Framing::chunked ? encode_chunked(message)
                                                   : encode_end_of_message(message));
}

std::string MessageChannel::receive() {
    char buf[16384];
    while (next_ >= ready_.size()) {
        ready_.clear();
        next_ = 0;
        const std::size_t n = stream_.read_some(buf, sizeof buf);
        if (n == 0) throw SessionError("peer closed the session");
        ready_ = framing_ == Framing::chunked ? chunked_.feed({buf, n}) : eom_.feed({buf, n});
    }
    return std::move(ready_[next_++]);
}

void MessageChannel::set_framing(Framing f) {
    if (f == framing_) return;
    // Bytes that arrived behind the hello already belong to the new framing.
    std::string carry = framing_ == Framing::end_of_message ? eom_.take_remainder() : std::string{};
    framing_ = f;
    if (!carry.empty()) {
        auto more = f == Framing::chunked ? chunked_.feed(carry) : eom_.feed(carry);
        for (auto &m : more) ready_.push_back(std::move(m));
    }
}

std::string build_hello(const std::vector<std::string> &capabilities, std::uint32_t session_id) {
    xml::Element hello(kNetconfNs, "hello");
    auto &caps = hello.add(kNetconfNs, "capabilities");
    for (const auto &c : capabilities) caps.add(kNetconfNs, "capability", c);
    if (session_id != 0) hello.add(kNetconfNs, "session-id", std::to_string(session_id));
    return xml::to_string(hello);
}

std::vector<std::string> default_capabilities() { return {kCapabilityBase10, kCapabilityBase11}; }

NetconfSession negotiate_session(MessageChannel &channel, Role role,
                                 const std::vector<std::string> &capabilities,
                                 std::uint32_t server_session_id) {
    NetconfSession session;
    if (role == Role::server) {
        if (server_session_id == 0) throw std::invalid_argument("server needs a session id");
        session.session_id = server_session_id;
    }
    channel.set_framing(Framing::end_of_message);
    channel.send(build_hello(capabilities, role == Role::server ? server_session_id : 0));
    session.state = SessionState::hello_sent;

    std::string raw;
    try {
        raw = channel.receive();
    } catch (const SessionError &) {
        session.state = SessionState::closed;
        throw SessionError("transport closed during hello exchange");
    }

    xml::Element peer;
    try {
        peer = xml::parse(raw);
    } catch (const xml::ParseError &e) {
        throw NegotiationError(std::string("malformed hello: ") + e.what());
    }
    if (peer.ns != kNetconfNs || peer.name != "hello")
        throw NegotiationError("expected <hello>, got <" + peer.name + ">");
    const auto *caps = peer.child(kNetconfNs, "capabilities");
    if (caps == nullptr) throw NegotiationError("hello without <capabilities>");
    for (const auto *c : caps->children_named(kNetconfNs, "capability"))
        session.peer_capabilities.push_back(c->trimmed_text());

    const auto *sid = peer.child(kNetconfNs, "session-id");
    if (role == Role::client) {
        if (sid == nullptr) throw NegotiationError("server hello without <session-id>");
        const auto text = sid->trimmed_text();
        std::uint32_t id = 0;
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
        if (ec != std::errc{} || end != text.data() + text.size() || id == 0)
            throw NegotiationError("invalid session-id '" + text + "'");
        session.session_id = id;
    } else if (sid != nullptr) {
        throw NegotiationError("client hello must not carry a session-id");
    }

    auto both = [&](const char *cap) {
        return std::find(capabilities.begin(), capabilities.end(), cap) != capabilities.end() &&
               std::find(session.peer_capabilities.begin(), session.peer_capabilities.end(),
                         cap) != session.peer_capabilities.end();
    };
    if (both(kCapabilityBase11)) {
        session.negotiated_version = NetconfVersion::v1_1;
        channel.set_framing(Framing::chunked);
    } else if (both(kCapabilityBase10)) {
        session.negotiated_version = NetconfVersion::v1_0;
    } else {
        throw NegotiationError("no common base capability");
    }
    session.state = SessionState::established;
    return session;
}

} // namespace capshare::netconf
