#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace capshare::netconf {

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reliable, ordered byte stream. An SSH channel would implement the same
/// interface.
class ByteStream {
public:
    virtual ~ByteStream() = default;
    /// Blocks for at least one byte. Returns 0 at end of stream.
    virtual std::size_t read_some(char *buffer, std::size_t size) = 0;
    virtual void write_all(std::string_view bytes) = 0;
    /// Unblocks pending reads on this stream; safe to call from another thread.
    virtual void shutdown() = 0;
};

class SocketStream : public ByteStream {
public:
    explicit SocketStream(int fd);
    ~SocketStream() override;
    SocketStream(const SocketStream &) = delete;
    SocketStream &operator=(const SocketStream &) = delete;

    std::size_t read_some(char *buffer, std::size_t size) override;
    void write_all(std::string_view bytes) override;
    void shutdown() override;
    // 0 means wait forever. Timed-out reads throw TransportError.
    void set_read_timeout(std::chrono::milliseconds timeout);

private:
    int fd_;
};

std::unique_ptr<SocketStream> connect_tcp(const std::string &host, std::uint16_t port,
                                          std::chrono::milliseconds timeout);

/// Two connected local streams, for running client and server in one process.
std::pair<std::unique_ptr<SocketStream>, std::unique_ptr<SocketStream>> stream_pair();

class TcpListener {
public:
    // Port 0 picks a free port.
    TcpListener(const std::string &host, std::uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener &) = delete;
    TcpListener &operator=(const TcpListener &) = delete;

    std::uint16_t port() const { return port_; }
    /// Returns nullptr on timeout or after close().
    std::unique_ptr<SocketStream> accept(std::chrono::milliseconds timeout);
    void close();

private:
    std::mutex mutex_;
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

} // namespace capshare::netconf
