#include "capshare/rapp/rapp.hpp"

#include <algorithm>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "capshare/nrm/allocation.hpp"
#include "capshare/pm/codec.hpp"

namespace capshare::rapp {

using nlohmann::json;

WallTime wall_now() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string_view to_string(LoopStatus s) {
    switch (s) {
    case LoopStatus::ok: return "ok";
    case LoopStatus::fetch_failed: return "fetch-failed";
    case LoopStatus::parse_failed: return "parse-failed";
    case LoopStatus::rpc_error: return "rpc-error";
    case LoopStatus::transport_error: return "transport-error";
    }
    return "unknown";
}

namespace {

LoopStatus status_from_string(const std::string &s) {
    for (auto st : {LoopStatus::ok, LoopStatus::fetch_failed, LoopStatus::parse_failed,
                    LoopStatus::rpc_error, LoopStatus::transport_error})
        if (to_string(st) == s) return st;
    throw std::invalid_argument("unknown loop status '" + s + "'");
}

// Timestamps as {"s": seconds, "ms": milliseconds}, the way Fig. 6-style
// traces print them.
json stamp(WallTime t) {
    const auto ms = t.time_since_epoch().count();
    return json{{"s", ms / 1000}, {"ms", ms % 1000}};
}

WallTime unstamp(const json &j) {
    return WallTime(std::chrono::milliseconds(j.at("s").get<std::int64_t>() * 1000 +
                                              j.at("ms").get<std::int64_t>()));
}

} // namespace

std::vector<std::string> RappConfig::violations() const {
    std::vector<std::string> out = nrm::validate_scenario(scenario);
    if (cells.empty()) out.emplace_back("no cells configured");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (cells[j].cell_id == cells[i].cell_id)
                out.push_back("duplicate cell id " + cells[i].cell_id);
            if (cells[j].pm_base_url == cells[i].pm_base_url)
                out.push_back("cells " + cells[j].cell_id + " and " + cells[i].cell_id +
                              " share a PM server");
        }
        if (cells[i].pm_base_url.empty()) out.push_back("cell " + cells[i].cell_id + " has no PM server");
    }
    if (watchdog.count() <= 0) out.emplace_back("watchdog must be positive");
    return out;
}

bool LoopRecord::timestamps_monotone() const {
    WallTime last = notification_received;
    for (const auto &t : {file_fetched, state_computed, inference_done, edit_config_sent,
                          rpc_reply_received}) {
        if (!t) continue;
        if (*t < last) return false;
        last = *t;
    }
    return true;
}

std::string LoopRecord::to_json() const {
    json t{{"notification_received", stamp(notification_received)}};
    auto put = [&](const char *k, const std::optional<WallTime> &v) {
        if (v) t[k] = stamp(*v);
    };
    put("file_fetched", file_fetched);
    put("state_computed", state_computed);
    put("inference_done", inference_done);
    put("edit_config_sent", edit_config_sent);
    put("rpc_reply_received", rpc_reply_received);
    json r = json::array();
    for (const auto &x : ratios) r.push_back({{"snssai", x.snssai.id}, {"ratio", x.dedicated_ratio}});
    json j{{"cell", cell_id}, {"step", step},   {"file", file_location},
           {"status", to_string(status)}, {"t", t}, {"ratios", r}};
    if (!message.empty()) j["message"] = message;
    return j.dump();
}

LoopRecord parse_loop_record(std::string_view line) {
    const auto j = json::parse(line);
    LoopRecord r;
    r.cell_id = j.at("cell").get<std::string>();
    r.step = j.at("step").get<std::int64_t>();
    r.file_location = j.at("file").get<std::string>();
    r.status = status_from_string(j.at("status").get<std::string>());
    r.message = j.value("message", std::string{});
    const auto &t = j.at("t");
    r.notification_received = unstamp(t.at("notification_received"));
    auto get = [&](const char *k) -> std::optional<WallTime> {
        if (!t.contains(k)) return std::nullopt;
        return unstamp(t.at(k));
    };
    r.file_fetched = get("file_fetched");
    r.state_computed = get("state_computed");
    r.inference_done = get("inference_done");
    r.edit_config_sent = get("edit_config_sent");
    r.rpc_reply_received = get("rpc_reply_received");
    for (const auto &x : j.at("ratios"))
        r.ratios.push_back({nrm::SNssai{x.at("snssai").get<std::uint32_t>()}, x.at("ratio").get<int>()});
    return r;
}

bool NotificationQueue::push(const pm::FileReadyNotification &n) {
    {
        std::lock_guard lock(mutex_);
        if (closed_ || n.file_location == last_popped_) return false;
        for (const auto &q : items_)
            if (q.file_location == n.file_location) return false;
        items_.push_back(n);
    }
    ready_.notify_one();
    return true;
}

std::optional<pm::FileReadyNotification> NotificationQueue::pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    if (!ready_.wait_for(lock, timeout, [&] { return !items_.empty() || closed_; })) return std::nullopt;
    if (items_.empty()) return std::nullopt;
    auto n = std::move(items_.front());
    items_.pop_front();
    last_popped_ = n.file_location;
    return n;
}

std::size_t NotificationQueue::size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
}

void NotificationQueue::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    ready_.notify_all();
}

CallbackListener::CallbackListener(std::string host, std::uint16_t port, std::string path, Route route)
    : host_(std::move(host)), port_(port), path_(std::move(path)), route_(std::move(route)) {}

CallbackListener::~CallbackListener() { stop(); }

void CallbackListener::start() {
    if (server_) return;
    server_ = std::make_unique<httplib::Server>();
    server_->Post(path_, [this](const httplib::Request &req, httplib::Response &res) {
        pm::FileReadyNotification n;
        try {
            n = pm::parse_notification(req.body);
        } catch (const pm::PmFormatError &e) {
            res.status = 400;
            res.set_content(e.what(), "text/plain");
            return;
        }
        res.status = route_(n);
    });
    const int bound = port_ == 0 ? server_->bind_to_any_port(host_)
                                 : (server_->bind_to_port(host_, port_) ? port_ : -1);
    if (bound < 0) {
        server_.reset();
        throw std::runtime_error("callback endpoint cannot bind " + host_ + ":" + std::to_string(port_));
    }
    port_ = std::uint16_t(bound);
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void CallbackListener::stop() {
    if (!server_) return;
    server_->stop();
    if (thread_.joinable()) thread_.join();
    server_.reset();
}

PolicyUpdater::PolicyUpdater(std::string host, std::uint16_t port, bool keep_alive,
                             std::chrono::milliseconds timeout)
    : host_(std::move(host)), port_(port), keep_alive_(keep_alive), timeout_(timeout) {}

netconf::NetconfClient &PolicyUpdater::session() {
    if (!client_) {
        client_ = netconf::NetconfClient::connect(host_, port_, timeout_);
        ++sessions_;
    }
    return *client_;
}

void PolicyUpdater::drop_session() {
    if (!client_) return;
    try {
        client_->close();
    } catch (const std::exception &) {
    }
    client_.reset();
}

UpdateResult PolicyUpdater::push(std::span<const nrm::RRMPolicyRatio> ratios) {
    UpdateResult result;
    if (ratios.empty()) return result;
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            auto &s = session();
            result.sent_at = wall_now();
            result.sent = true;
            s.edit_config(ratios);
            result.reply_at = wall_now();
            result.status = LoopStatus::ok;
            result.message.clear();
            if (!keep_alive_) drop_session();
            return result;
        } catch (const netconf::RpcFailure &e) {
            result.reply_at = wall_now();
            result.status = LoopStatus::rpc_error;
            result.message = e.what();
            if (!keep_alive_) drop_session();
            return result;
        } catch (const std::exception &e) {
            // Transport or session trouble: one more try on a fresh session.
            client_.reset();
            result.status = LoopStatus::transport_error;
            result.message = e.what();
        }
    }
    return result;
}

std::vector<nrm::RRMPolicyRatio> PolicyUpdater::read_current() {
    for (int attempt = 0;; ++attempt) {
        try {
            auto out = session().get_config();
            if (!keep_alive_) drop_session();
            return out;
        } catch (const netconf::RpcFailure &) {
            if (!keep_alive_) drop_session();
            throw;
        } catch (const std::exception &) {
            client_.reset();
            if (attempt == 1) throw;
        }
    }
}

CellController::CellController(nrm::ScenarioConfig scenario, CellEndpoint endpoint,
                               const policy::TrainedPolicy &policy, const RappConfig &config)
    : scenario_(std::move(scenario)), endpoint_(std::move(endpoint)), policy_(policy),
      retriever_(config.fetch_timeout),
      updater_(endpoint_.netconf_host, endpoint_.netconf_port, config.keep_alive,
               config.netconf_timeout) {}

void CellController::initialize() {
    const auto running = updater_.read_current();
    current_.clear();
    for (const auto &t : scenario_.tenants) {
        auto it = std::find_if(running.begin(), running.end(),
                               [&](const auto &r) { return r.snssai == t.snssai; });
        current_.push_back(it != running.end() ? *it : nrm::RRMPolicyRatio{t.snssai, t.initial_ratio});
    }
}

LoopRecord CellController::handle(const pm::FileReadyNotification &n, WallTime received) {
    LoopRecord rec;
    rec.cell_id = endpoint_.cell_id;
    rec.step = step_++;
    rec.file_location = n.file_location;
    rec.notification_received = received;
    rec.ratios = current_;

    std::string bytes;
    try {
        bytes = pm::fetch_pm_file(n, retriever_);
    } catch (const pm::RetrievalError &e) {
        rec.status = LoopStatus::fetch_failed;
        rec.message = e.what();
        return rec;
    }
    rec.file_fetched = wall_now();

    pm::PmReport report;
    try {
        report = pm::parse_pm_report(bytes);
    } catch (const pm::PmFormatError &e) {
        rec.status = LoopStatus::parse_failed;
        rec.message = e.what();
        return rec;
    }
    rec.state_computed = wall_now();

    std::vector<nrm::RRMPolicyRatio> next;
    try {
        next = policy::decide_ratios(policy_, report, scenario_, current_);
    } catch (const std::exception &e) {
        rec.status = LoopStatus::parse_failed;
        rec.message = std::string("cannot compute state: ") + e.what();
        return rec;
    }
    rec.inference_done = wall_now();

    const auto update = updater_.push(next);
    rec.edit_config_sent = update.sent_at;
    rec.rpc_reply_received = update.reply_at;
    rec.status = update.status;
    rec.message = update.message;
    if (update.status == LoopStatus::ok) current_ = next;
    rec.ratios = current_;
    return rec;
}

Rapp::Rapp(RappConfig config, policy::TrainedPolicy policy, Sink sink)
    : config_(std::move(config)), policy_(std::move(policy)), sink_(std::move(sink)) {
    if (auto v = config_.violations(); !v.empty())
        throw nrm::ConfigurationError("rapp config: " + v.front());
    for (const auto &t : config_.scenario.tenants)
        if (policy_.find(t.snssai) == nullptr)
            throw nrm::ConfigurationError("no policy for snssai " + std::to_string(t.snssai.id));
    for (const auto &cell : config_.cells) {
        auto scenario = config_.scenario;
        scenario.cell.cell_id = cell.cell_id;
        cells_.push_back(std::make_unique<CellController>(scenario, cell, policy_, config_));
        queues_.push_back(std::make_unique<NotificationQueue>());
    }
}

Rapp::~Rapp() { stop(); }

void Rapp::start() {
    for (auto &c : cells_) {
        c->initialize();
        spdlog::info("cell {}: running ratios loaded over NETCONF", c->endpoint().cell_id);
    }
    listener_ = std::make_unique<CallbackListener>(
        config_.callback_host, config_.callback_port, config_.callback_path,
        [this](const pm::FileReadyNotification &n) {
            for (std::size_t i = 0; i < cells_.size(); ++i)
                if (n.file_location.rfind(cells_[i]->endpoint().pm_base_url, 0) == 0) {
                    queues_[i]->push(n);
                    return 204;
                }
            return 404;
        });
    listener_->start();
    spdlog::info("rapp listening for file-ready notifications on {}:{}{}", config_.callback_host,
                 listener_->port(), config_.callback_path);
}

std::uint16_t Rapp::callback_port() const { return listener_ ? listener_->port() : 0; }

void Rapp::stop() {
    for (auto &q : queues_) q->close();
    if (listener_) listener_->stop();
}

void Rapp::cell_loop(std::size_t index, const std::atomic<bool> &stop_flag, long max_periods) {
    auto &cell = *cells_[index];
    auto &queue = *queues_[index];
    auto last = std::chrono::steady_clock::now();
    bool flagged = false;
    long handled = 0;
    while (!stop_flag && (max_periods < 0 || handled < max_periods)) {
        auto n = queue.pop(std::chrono::milliseconds(50));
        if (!n) {
            if (!flagged && std::chrono::steady_clock::now() - last > config_.watchdog) {
                spdlog::warn("cell {}: no file-ready notification for {} ms", cell.endpoint().cell_id,
                             config_.watchdog.count());
                flagged = true;
            }
            continue;
        }
        const auto received = wall_now();
        last = std::chrono::steady_clock::now();
        flagged = false;
        auto rec = cell.handle(*n, received);
        ++handled;
        if (rec.status != LoopStatus::ok)
            spdlog::warn("cell {} step {}: {} {}", rec.cell_id, rec.step, to_string(rec.status),
                         rec.message);
        std::lock_guard lock(records_mutex_);
        if (sink_) sink_(rec);
        records_.push_back(std::move(rec));
    }
}

void Rapp::run(const std::atomic<bool> &stop_flag, long max_periods) {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < cells_.size(); ++i)
        threads.emplace_back([this, i, &stop_flag, max_periods] { cell_loop(i, stop_flag, max_periods); });
    for (auto &t : threads) t.join();
}

std::vector<LoopRecord> Rapp::records() const {
    std::lock_guard lock(records_mutex_);
    return records_;
}

} // namespace capshare::rapp
