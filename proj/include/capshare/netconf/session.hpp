#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "capshare/netconf/framing.hpp"
#include "capshare/netconf/transport.hpp"

namespace capshare::netconf {

inline constexpr const char *kNetconfNs = "urn:ietf:params:xml:ns:netconf:base:1.0";
inline constexpr const char *kCapabilityBase10 = "urn:ietf:params:netconf:base:1.0";
inline constexpr const char *kCapabilityBase11 = "urn:ietf:params:netconf:base:1.1";

class SessionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NegotiationError : public SessionError {
public:
    using SessionError::SessionError;
};

enum class NetconfVersion { v1_0, v1_1 };
enum class SessionState { connecting, hello_sent, established, closed };
enum class Role { client, server };

struct NetconfSession {
    std::uint32_t session_id = 0;
    NetconfVersion negotiated_version = NetconfVersion::v1_0;
    SessionState state = SessionState::connecting;
    std::vector<std::string> peer_capabilities;
};

/// Message-level view of a ByteStream. Starts in end-of-message framing, as
/// hellos are always sent that way.
class MessageChannel {
public:
    explicit MessageChannel(ByteStream &stream) : stream_(stream) {}

    void send(std::string_view message);
    /// Blocks for the next complete message. Throws SessionError if the peer
    /// closes the stream and FramingError on malformed framing.
    std::string receive();
    void set_framing(Framing f);
    Framing framing() const { return framing_; }
    ByteStream &stream() { return stream_; }

private:
    ByteStream &stream_;
    Framing framing_ = Framing::end_of_message;
    EndOfMessageDecoder eom_;
    ChunkedDecoder chunked_;
    std::vector<std::string> ready_;
    std::size_t next_ = 0;
};

std::string build_hello(const std::vector<std::string> &capabilities,
                        std::uint32_t session_id = 0);

/// Exchanges hellos and switches the channel to the negotiated framing. The
/// server passes the session id it assigns; the client learns it from the
/// server's hello.
NetconfSession negotiate_session(MessageChannel &channel, Role role,
                                 const std::vector<std::string> &capabilities,
                                 std::uint32_t server_session_id = 0);

std::vector<std::string> default_capabilities();

} // namespace capshare::netconf
