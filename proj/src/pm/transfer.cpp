#include "capshare/pm/transfer.hpp"

#include <charconv>
#include <fstream>

#include <httplib.h>

namespace capshare::pm {

namespace {

constexpr std::string_view kPathPrefix = "/pm/";

std::chrono::microseconds as_us(std::chrono::milliseconds ms) { return ms; }

void set_timeouts(httplib::Client &c, std::chrono::milliseconds timeout) {
    const auto us = as_us(timeout).count();
    c.set_connection_timeout(us / 1000000, us % 1000000);
    c.set_read_timeout(us / 1000000, us % 1000000);
    c.set_write_timeout(us / 1000000, us % 1000000);
}

} // namespace

HttpUrl parse_http_url(std::string_view url) {
    constexpr std::string_view scheme = "http://";
    if (url.substr(0, scheme.size()) != scheme)
        throw std::invalid_argument("only http:// URLs are supported: " + std::string(url));
    url.remove_prefix(scheme.size());
    HttpUrl out;
    const auto slash = url.find('/');
    std::string_view authority = url.substr(0, slash);
    out.path = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
        const auto port = authority.substr(colon + 1);
        unsigned v = 0;
        const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), v);
        if (port.empty() || ec != std::errc{} || end != port.data() + port.size() || v == 0 ||
            v > 65535)
            throw std::invalid_argument("invalid port in URL: " + std::string(port));
        out.port = std::uint16_t(v);
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) throw std::invalid_argument("URL without host");
    out.host = authority;
    return out;
}

PmFileServer::PmFileServer(std::string host, std::uint16_t port, std::filesystem::path mirror_dir)
    : host_(std::move(host)), port_(port), mirror_(std::move(mirror_dir)) {}

PmFileServer::~PmFileServer() { stop(); }

void PmFileServer::start() {
    if (server_) return;
    server_ = std::make_unique<httplib::Server>();
    server_->Get(R"(/pm/([^/]+))", [this](const httplib::Request &req, httplib::Response &res) {
        std::shared_ptr<const std::string> body;
        {
            std::lock_guard lock(mutex_);
            auto it = files_.find(req.matches[1].str());
            if (it != files_.end()) body = it->second;
        }
        if (!body) {
            res.status = 404;
            return;
        }
        res.set_content(*body, "application/xml; charset=utf-8");
    });
    const int bound = port_ == 0 ? server_->bind_to_any_port(host_)
                                 : (server_->bind_to_port(host_, port_) ? port_ : -1);
    if (bound < 0) {
        server_.reset();
        throw std::runtime_error("PM file server cannot bind " + host_ + ":" + std::to_string(port_));
    }
    port_ = std::uint16_t(bound);
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void PmFileServer::stop() {
    if (!server_) return;
    server_->stop();
    if (thread_.joinable()) thread_.join();
    server_.reset();
}

FileReadyNotification PmFileServer::publish(const std::string &name, std::string bytes,
                                            TimePoint ready_time) {
    if (name.empty() || name.find('/') != std::string::npos)
        throw std::invalid_argument("invalid PM file name '" + name + "'");
    const std::uint64_t size = bytes.size();
    {
        std::lock_guard lock(mutex_);
        auto it = files_.find(name);
        if (it != files_.end()) {
            if (*it->second != bytes)
                throw std::logic_error("PM file " + name + " was already announced");
        } else {
            files_.emplace(name, std::make_shared<const std::string>(bytes));
        }
    }
    if (!mirror_.empty()) {
        std::filesystem::create_directories(mirror_);
        std::ofstream out(mirror_ / name, std::ios::binary | std::ios::trunc);
        out << bytes;
    }
    return FileReadyNotification{url_for(name), size, ready_time};
}

std::string PmFileServer::url_for(const std::string &name) const {
    return "http://" + host_ + ":" + std::to_string(port_) + std::string(kPathPrefix) + name;
}

std::size_t PmFileServer::file_count() const {
    std::lock_guard lock(mutex_);
    return files_.size();
}

std::string HttpFileRetriever::fetch(const std::string &location) {
    HttpUrl url;
    try {
        url = parse_http_url(location);
    } catch (const std::invalid_argument &e) {
        throw RetrievalError(e.what());
    }
    httplib::Client client(url.host, url.port);
    set_timeouts(client, timeout_);
    auto res = client.Get(url.path);
    if (!res) throw RetrievalError("GET " + location + ": " + httplib::to_string(res.error()));
    if (res->status == 404) throw MissingFileError("no PM file at " + location);
    if (res->status != 200)
        throw RetrievalError("GET " + location + ": HTTP " + std::to_string(res->status));
    return std::move(res->body);
}

std::string fetch_pm_file(const FileReadyNotification &notification, FileRetriever &retriever) {
    auto bytes = retriever.fetch(notification.file_location);
    if (bytes.size() != notification.file_size)
        throw IntegrityError("PM file " + notification.file_location + " has " +
                             std::to_string(bytes.size()) + " bytes, notification announced " +
                             std::to_string(notification.file_size));
    return bytes;
}

std::string fetch_pm_file(const std::string &location) {
    HttpFileRetriever r;
    return r.fetch(location);
}

DeliveryResult notify_file_ready(const std::string &endpoint, const FileReadyNotification &n,
                                 std::chrono::milliseconds timeout) {
    DeliveryResult out;
    HttpUrl url;
    try {
        url = parse_http_url(endpoint);
    } catch (const std::invalid_argument &e) {
        out.error = e.what();
        return out;
    }
    httplib::Client client(url.host, url.port);
    set_timeouts(client, timeout);
    auto res = client.Post(url.path, to_json(n), "application/json");
    if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.status = res->status;
    out.delivered = res->status >= 200 && res->status < 300;
    if (!out.delivered) out.error = "HTTP " + std::to_string(res->status);
    return out;
}

DeliveryResult FileReadyNotifier::deliver(const FileReadyNotification &n) {
    if (pending_) {
        auto retry = notify_file_ready(endpoint_, *pending_, timeout_);
        if (!retry.delivered) {
            ++failures_;
            pending_ = n;
            return retry;
        }
        pending_.reset();
    }
    auto result = notify_file_ready(endpoint_, n, timeout_);
    if (!result.delivered) {
        ++failures_;
        pending_ = n;
    }
    return result;
}

} // namespace capshare::pm
