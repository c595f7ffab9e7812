#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>

#include "capshare/pm/notification.hpp"

namespace httplib {
class Server;
}

namespace capshare::pm {

class RetrievalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingFileError : public RetrievalError {
public:
    using RetrievalError::RetrievalError;
};

class IntegrityError : public RetrievalError {
public:
    using RetrievalError::RetrievalError;
};

struct HttpUrl {
    std::string host;
    std::uint16_t port = 80;
    std::string path = "/";
};

/// Only plain "http://host[:port][/path]". Throws std::invalid_argument.
HttpUrl parse_http_url(std::string_view url);

/// Serves published PM files over HTTP GET at /pm/<name>. Files are kept in
/// memory for the server's lifetime and optionally mirrored to a directory.
class PmFileServer {
public:
    PmFileServer(std::string host, std::uint16_t port, std::filesystem::path mirror_dir = {});
    ~PmFileServer();
    PmFileServer(const PmFileServer &) = delete;
    PmFileServer &operator=(const PmFileServer &) = delete;

    /// Binds (port 0 picks a free one) and serves on a background thread.
    void start();
    void stop();
    std::uint16_t port() const { return port_; }

    /// Stores `bytes` under `name` and returns the notification announcing it.
    /// Announced files are immutable: republishing a name with different
    /// content throws std::logic_error.
    FileReadyNotification publish(const std::string &name, std::string bytes, TimePoint ready_time);
    std::string url_for(const std::string &name) const;
    std::size_t file_count() const;

private:
    std::string host_;
    std::uint16_t port_;
    std::filesystem::path mirror_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const std::string>> files_;
};

/// Retrieval backend; an SFTP implementation would slot in here.
class FileRetriever {
public:
    virtual ~FileRetriever() = default;
    /// Throws MissingFileError if the location does not exist, RetrievalError otherwise.
    virtual std::string fetch(const std::string &location) = 0;
};

class HttpFileRetriever : public FileRetriever {
public:
    explicit HttpFileRetriever(std::chrono::milliseconds timeout = std::chrono::seconds(5))
        : timeout_(timeout) {}
    std::string fetch(const std::string &location) override;

private:
    std::chrono::milliseconds timeout_;
};

/// Fetches the announced file and checks its size against the notification.
std::string fetch_pm_file(const FileReadyNotification &notification, FileRetriever &retriever);
std::string fetch_pm_file(const std::string &location);

struct DeliveryResult {
    bool delivered = false;
    int status = 0; // HTTP status, 0 if no response
    std::string error;
};

/// POSTs the notification as JSON. Success means a 2xx answer.
DeliveryResult notify_file_ready(const std::string &endpoint, const FileReadyNotification &n,
                                 std::chrono::milliseconds timeout = std::chrono::seconds(2));

/// Periodic sender that keeps at most one undelivered notification (the newest)
/// and retries it before the next one.
class FileReadyNotifier {
public:
    explicit FileReadyNotifier(std::string endpoint,
                               std::chrono::milliseconds timeout = std::chrono::seconds(2))
        : endpoint_(std::move(endpoint)), timeout_(timeout) {}

    DeliveryResult deliver(const FileReadyNotification &n);
    bool has_pending() const { return pending_.has_value(); }
    const std::optional<FileReadyNotification> &pending() const { return pending_; }
    std::uint64_t failures() const { return failures_; }
    const std::string &endpoint() const { return endpoint_; }

private:
    std::string endpoint_;
    std::chrono::milliseconds timeout_;
    std::optional<FileReadyNotification> pending_;
    std::uint64_t failures_ = 0;
};

} // namespace capshare::pm
