#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include "capshare/netconf/rpc.hpp"
#include "capshare/netconf/server.hpp"
#include "capshare/odu/service.hpp"
#include "capshare/pm/codec.hpp"
#include "capshare/pm/transfer.hpp"
#include "capshare/rapp/rapp.hpp"

// After Eigen: <resolv.h> defines a _res macro that clashes with it.
#include <httplib.h>

using namespace capshare;
using namespace capshare::rapp;
using namespace std::chrono_literals;

namespace {

// Every tenant always takes the action at `index` (0 down, 1 hold, 2 up).
policy::TrainedPolicy constant_policy(int index) {
    policy::TrainedPolicy p;
    for (std::uint32_t id : {1u, 2u}) {
        policy::QNetwork net(int(policy::kStateSize), 4, 3);
        net.b2(index) = 1.0;
        p.tenants.push_back({nrm::SNssai{id}, policy::ActionSet::three(3),
                             policy::FeatureNormalization::standard(), net});
    }
    return p;
}

pm::PmReport report_at(int minute) {
    pm::PmReport r;
    r.cell_id = "1";
    r.begin_time = pm::parse_iso8601(odu::kEpochText) + std::chrono::minutes(minute);
    r.granularity_s = 180;
    r.dl_total_available_prb = 106;
    r.slices = {{nrm::SNssai{1}, 30, 5000}, {nrm::SNssai{2}, 20, 3000}};
    return r;
}

int post(std::uint16_t port, const std::string &body) {
    httplib::Client c("127.0.0.1", port);
    auto res = c.Post("/notify", body, "application/json");
    return res ? res->status : 0;
}

// NETCONF server that rejects every edit-config.
struct RejectingServer {
    netconf::PolicyDatastore store;
    netconf::TcpListener listener{"127.0.0.1", 0};
    std::thread thread;
    std::atomic<bool> running{true};

    RejectingServer() {
        thread = std::thread([this] {
            while (running) {
                auto s = listener.accept(50ms);
                if (!s) continue;
                try {
                    netconf::MessageChannel ch(*s);
                    netconf::negotiate_session(ch, netconf::Role::server, netconf::default_capabilities(), 1);
                    for (;;) {
                        const auto rpc = xml::parse(ch.receive());
                        if (netconf::classify_rpc(rpc) == netconf::Operation::edit_config) {
                            ch.send(xml::to_string(netconf::make_error_reply(
                                &rpc, {"application", "operation-failed", "error", "no"})));
                            continue;
                        }
                        ch.send(xml::to_string(netconf::handle_rpc(store, rpc)));
                        if (netconf::classify_rpc(rpc) == netconf::Operation::close_session) break;
                    }
                } catch (const std::exception &) {
                }
            }
        });
    }
    ~RejectingServer() {
        running = false;
        listener.close();
        thread.join();
    }
};

RappConfig config_for(std::uint16_t netconf_port, std::uint16_t pm_port) {
    RappConfig c;
    c.callback_port = 0;
    c.cells[0].netconf_port = netconf_port;
    c.cells[0].pm_base_url = "http://127.0.0.1:" + std::to_string(pm_port);
    c.netconf_timeout = 2000ms;
    c.fetch_timeout = 2000ms;
    return c;
}

} // namespace

TEST_CASE("loop records serialize to one JSON line and back", "[rapp]") {
    LoopRecord r;
    r.cell_id = "1";
    r.step = 4;
    r.file_location = "http://h/pm/x.xml";
    r.notification_received = WallTime(1000ms);
    r.file_fetched = WallTime(1001ms);
    r.state_computed = WallTime(1002ms);
    r.inference_done = WallTime(1002ms);
    r.edit_config_sent = WallTime(1003ms);
    r.rpc_reply_received = WallTime(1010ms);
    r.ratios = {{nrm::SNssai{1}, 57}, {nrm::SNssai{2}, 42}};
    const auto line = r.to_json();
    CHECK(line.find('\n') == std::string::npos);
    const auto back = parse_loop_record(line);
    CHECK(back.step == 4);
    CHECK(back.ratios == r.ratios);
    CHECK(back.rpc_reply_received == r.rpc_reply_received);
    CHECK(back.timestamps_monotone());
    r.file_fetched = WallTime(999ms);
    CHECK_FALSE(r.timestamps_monotone());
}

TEST_CASE("duplicate notifications are coalesced", "[rapp][queue]") {
    NotificationQueue q;
    const pm::FileReadyNotification a{"http://h/pm/a.xml", 1, {}}, b{"http://h/pm/b.xml", 1, {}};
    CHECK(q.push(a));
    CHECK_FALSE(q.push(a));
    CHECK(q.size() == 1);
    CHECK(q.pop(10ms)->file_location == a.file_location);
    CHECK_FALSE(q.push(a));
    CHECK(q.push(b));
    CHECK(q.pop(10ms)->file_location == b.file_location);
    CHECK_FALSE(q.pop(10ms).has_value());
    q.close();
    CHECK_FALSE(q.pop(1s).has_value());
}

TEST_CASE("the callback endpoint validates and routes", "[rapp][listener]") {
    NotificationQueue q;
    CallbackListener listener("127.0.0.1", 0, "/notify", [&](const pm::FileReadyNotification &n) {
        if (n.file_location.rfind("http://cell1/", 0) != 0) return 404;
        q.push(n);
        return 204;
    });
    listener.start();
    const pm::FileReadyNotification n{"http://cell1/pm/a.xml", 10, pm::parse_iso8601(odu::kEpochText)};
    CHECK(post(listener.port(), pm::to_json(n)) == 204);
    CHECK(post(listener.port(), pm::to_json(n)) == 204);
    CHECK(q.size() == 1);
    CHECK(post(listener.port(), R"({"file_size":1,"ready_time":"2024-01-01T00:00:00Z"})") == 400);
    auto other = n;
    other.file_location = "http://cell9/pm/a.xml";
    CHECK(post(listener.port(), pm::to_json(other)) == 404);
    listener.stop();
}

TEST_CASE("an empty ratio list sends nothing", "[rapp][updater]") {
    PolicyUpdater u("127.0.0.1", 1, false, 200ms);
    const auto r = u.push({});
    CHECK(r.status == LoopStatus::ok);
    CHECK_FALSE(r.sent);
    CHECK(u.sessions_opened() == 0);
}

TEST_CASE("one edit-config per period carries every tenant", "[rapp][updater]") {
    netconf::PolicyDatastore store;
    netconf::NetconfServer server(store, {"127.0.0.1", 0, netconf::default_capabilities()});
    server.start();
    for (bool keep : {false, true}) {
        PolicyUpdater u("127.0.0.1", server.port(), keep, 2s);
        const auto before = store.revision();
        const std::vector<nrm::RRMPolicyRatio> r{{nrm::SNssai{1}, 57}, {nrm::SNssai{2}, 42}};
        for (int i = 0; i < 3; ++i) {
            const auto res = u.push(r);
            REQUIRE(res.status == LoopStatus::ok);
            CHECK(res.sent_at <= res.reply_at);
        }
        CHECK(store.revision() == before + 3);
        CHECK(u.read_current() == r);
        CHECK(u.sessions_opened() == (keep ? 1u : 4u));
    }
    server.stop();
}

TEST_CASE("an rpc-error marks the period failed and keeps the ratios", "[rapp][controller]") {
    RejectingServer nc;
    pm::PmFileServer files("127.0.0.1", 0);
    files.start();
    const auto cfg = config_for(nc.listener.port(), files.port());
    const auto policy = constant_policy(2);
    CellController cell(cfg.scenario, cfg.cells[0], policy, cfg);
    cell.initialize();
    const auto start = cell.current_ratios();
    CHECK(start[0].dedicated_ratio == 60);

    const auto r = report_at(0);
    const auto n = files.publish(pm::pm_file_name(r), pm::serialize_pm_report(r), r.end_time());
    const auto rec = cell.handle(n, wall_now());
    CHECK(rec.status == LoopStatus::rpc_error);
    CHECK(cell.current_ratios() == start);
    CHECK(rec.ratios == start);
}

TEST_CASE("a missing PM file skips the period and the loop carries on", "[rapp][controller]") {
    netconf::PolicyDatastore store;
    netconf::NetconfServer server(store, {"127.0.0.1", 0, netconf::default_capabilities()});
    server.start();
    pm::PmFileServer files("127.0.0.1", 0);
    files.start();
    const auto cfg = config_for(server.port(), files.port());
    const auto policy = constant_policy(2);
    CellController cell(cfg.scenario, cfg.cells[0], policy, cfg);
    cell.initialize();

    const pm::FileReadyNotification gone{files.url_for("gone.xml"), 10, {}};
    const auto before = store.revision();
    const auto failed = cell.handle(gone, wall_now());
    CHECK(failed.status == LoopStatus::fetch_failed);
    CHECK(store.revision() == before);

    const auto r = report_at(3);
    const auto n = files.publish(pm::pm_file_name(r), pm::serialize_pm_report(r), r.end_time());
    const auto ok = cell.handle(n, wall_now());
    CHECK(ok.status == LoopStatus::ok);
    CHECK(ok.step == 1);
    CHECK(ok.timestamps_monotone());
    CHECK(store.revision() == before + 1);
    CHECK(cell.current_ratios()[0].dedicated_ratio == 63);
    server.stop();
}

TEST_CASE("an unchanged decision is re-sent every period", "[rapp][controller]") {
    netconf::PolicyDatastore store;
    netconf::NetconfServer server(store, {"127.0.0.1", 0, netconf::default_capabilities()});
    server.start();
    pm::PmFileServer files("127.0.0.1", 0);
    files.start();
    const auto cfg = config_for(server.port(), files.port());
    const auto policy = constant_policy(1);
    CellController cell(cfg.scenario, cfg.cells[0], policy, cfg);
    cell.initialize();
    for (int i = 0; i < 3; ++i) {
        const auto r = report_at(3 * i);
        const auto n = files.publish(pm::pm_file_name(r), pm::serialize_pm_report(r), r.end_time());
        const auto rec = cell.handle(n, wall_now());
        REQUIRE(rec.status == LoopStatus::ok);
        CHECK(rec.ratios == cfg.scenario.initial_ratios());
    }
    CHECK(store.revision() == 3);
    server.stop();
}

TEST_CASE("a policy missing a tenant is a configuration error", "[rapp]") {
    auto p = constant_policy(1);
    p.tenants.pop_back();
    CHECK_THROWS_AS(Rapp(RappConfig{}, p), nrm::ConfigurationError);
}

TEST_CASE("rapp and the O-DU run the loop in lockstep", "[rapp][e2e]") {
    odu::OduServiceOptions o;
    o.netconf_port = 0;
    o.pm_port = 0;
    o.acceleration = 0.0;
    o.lockstep_timeout = 5s;
    odu::OduService odu(nrm::reference_scenario(),
                        {odu::TrafficProfile::flat(0.3, 0), odu::TrafficProfile::flat(0.2, 0)}, 1, o);
    odu.start();

    auto cfg = config_for(odu.netconf_port(), odu.pm_port());
    std::vector<LoopRecord> sunk;
    Rapp app(cfg, constant_policy(0), [&](const LoopRecord &r) { sunk.push_back(r); });
    app.start();
    // The O-DU learns the callback port only now.
    odu.stop();
    o.netconf_port = odu.netconf_port();
    o.pm_port = odu.pm_port();
    o.notify_url = "http://127.0.0.1:" + std::to_string(app.callback_port()) + "/notify";
    odu::OduService live(nrm::reference_scenario(),
                         {odu::TrafficProfile::flat(0.3, 0), odu::TrafficProfile::flat(0.2, 0)}, 1, o);
    live.start();

    std::atomic<bool> stop{false};
    std::thread rapp_thread([&] { app.run(stop, 5); });
    const auto stats = live.run(5);
    rapp_thread.join();
    app.stop();
    live.stop();

    CHECK(stats.lockstep_timeouts == 0);
    REQUIRE(sunk.size() == 5);
    for (std::size_t i = 0; i < sunk.size(); ++i) {
        CHECK(sunk[i].status == LoopStatus::ok);
        CHECK(sunk[i].timestamps_monotone());
        CHECK(sunk[i].ratios[0].dedicated_ratio == 60 - 3 * int(i + 1));
    }
    // Each period's edit-config is in force for the next period.
    const auto &recs = live.records();
    for (std::size_t i = 1; i < recs.size(); ++i)
        CHECK(recs[i].ratios[0].dedicated_ratio == 60 - 3 * int(i));
}
