#include "capshare/netconf/transport.hpp"

#include <cerrno>
#include <cstring>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace capshare::netconf {

namespace {

[[noreturn]] void sys_fail(const std::string &what) {
    throw TransportError(what + ": " + std::strerror(errno));
}

void set_nodelay(int fd) {
    int one = 1;
    // Not a TCP socket for stream_pair(); ignore the error there.
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

} // namespace

SocketStream::SocketStream(int fd) : fd_(fd) {}

SocketStream::~SocketStream() {
    if (fd_ >= 0) ::close(fd_);
}

std::size_t SocketStream::read_some(char *buffer, std::size_t size) {
    for (;;) {
        const ssize_t n = ::recv(fd_, buffer, size, 0);
        if (n >= 0) return std::size_t(n);
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) throw TransportError("read timed out");
        if (errno == ECONNRESET || errno == ENOTCONN) return 0;
        sys_fail("recv");
    }
}

void SocketStream::write_all(std::string_view bytes) {
    while (!bytes.empty()) {
        const ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            sys_fail("send");
        }
        bytes.remove_prefix(std::size_t(n));
    }
}

void SocketStream::shutdown() { ::shutdown(fd_, SHUT_RDWR); }

void SocketStream::set_read_timeout(std::chrono::milliseconds timeout) {
    timeval tv{};
    tv.tv_sec = timeout.count() / 1000;
    tv.tv_usec = (timeout.count() % 1000) * 1000;
    if (::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv) != 0) sys_fail("SO_RCVTIMEO");
}

std::unique_ptr<SocketStream> connect_tcp(const std::string &host, std::uint16_t port,
                                          std::chrono::milliseconds timeout) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo *res = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
        throw TransportError("resolve " + host + ": " + ::gai_strerror(rc));

    std::string last_error = "no addresses";
    for (addrinfo *ai = res; ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) continue;
        const int flags = ::fcntl(fd, F_GETFL);
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
        if (rc != 0 && errno == EINPROGRESS) {
            pollfd p{fd, POLLOUT, 0};
            rc = ::poll(&p, 1, int(timeout.count())) == 1 ? 0 : -1;
            int err = 0;
            socklen_t len = sizeof err;
            if (rc == 0 && (::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len) != 0 || err != 0)) {
                errno = err;
                rc = -1;
            } else if (rc != 0) {
                errno = ETIMEDOUT;
            }
        }
        if (rc == 0) {
            ::fcntl(fd, F_SETFL, flags);
            set_nodelay(fd);
            ::freeaddrinfo(res);
            return std::make_unique<SocketStream>(fd);
        }
        last_error = std::strerror(errno);
        ::close(fd);
    }
    ::freeaddrinfo(res);
    throw TransportError("connect " + host + ":" + service + ": " + last_error);
}

std::pair<std::unique_ptr<SocketStream>, std::unique_ptr<SocketStream>> stream_pair() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) sys_fail("socketpair");
    return {std::make_unique<SocketStream>(fds[0]), std::make_unique<SocketStream>(fds[1])};
}

TcpListener::TcpListener(const std::string &host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo *res = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
        rc != 0)
        throw TransportError("resolve " + host + ": " + ::gai_strerror(rc));
    std::string last_error = "no addresses";
    for (addrinfo *ai = res; ai != nullptr && fd_ < 0; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 8) == 0) {
            fd_ = fd;
        } else {
            last_error = std::strerror(errno);
            ::close(fd);
        }
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw TransportError("listen " + host + ":" + service + ": " + last_error);

    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr *>(&addr), &len);
    port_ = addr.ss_family == AF_INET6
                ? ntohs(reinterpret_cast<sockaddr_in6 *>(&addr)->sin6_port)
                : ntohs(reinterpret_cast<sockaddr_in *>(&addr)->sin_port);
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
    std::lock_guard lock(mutex_);
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

std::unique_ptr<SocketStream> TcpListener::accept(std::chrono::milliseconds timeout) {
    int fd;
    {
        std::lock_guard lock(mutex_);
        fd = fd_;
    }
    if (fd < 0) return nullptr;
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, int(timeout.count()));
    if (rc <= 0 || !(p.revents & POLLIN)) return nullptr;
    std::lock_guard lock(mutex_);
    if (fd_ < 0) return nullptr;
    const int client = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (client < 0) {
        if (errno == EAGAIN || errno == EINTR || errno == ECONNABORTED) return nullptr;
        sys_fail("accept");
    }
    set_nodelay(client);
    return std::make_unique<SocketStream>(client);
}

} // namespace capshare::netconf
