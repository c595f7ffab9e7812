#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <httplib.h>

#include "capshare/pm/codec.hpp"
#include "capshare/pm/notification.hpp"
#include "capshare/pm/transfer.hpp"

using namespace capshare;
using namespace capshare::pm;

namespace {

PmReport sample_report() {
    PmReport r;
    r.cell_id = "1";
    r.begin_time = parse_iso8601("2024-01-01T00:00:00Z");
    r.granularity_s = 180;
    r.dl_total_available_prb = 106;
    r.slices = {{nrm::SNssai{1}, 60, 12636}, {nrm::SNssai{2}, 40, 8424}};
    return r;
}

std::string replace(std::string s, const std::string &from, const std::string &to) {
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

// Minimal notification sink answering with a fixed status.
struct Sink {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::vector<std::string> bodies;
    std::mutex mutex;

    explicit Sink(int status) {
        server.Post("/notify", [this, status](const httplib::Request &req, httplib::Response &res) {
            std::lock_guard lock(mutex);
            bodies.push_back(req.body);
            res.status = status;
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~Sink() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/notify"; }
};

// A port nothing listens on.
std::uint16_t closed_port() {
    httplib::Server s;
    return std::uint16_t(s.bind_to_any_port("127.0.0.1"));
}

} // namespace

TEST_CASE("the sample report round-trips exactly", "[pm][codec]") {
    const auto r = sample_report();
    const auto text = serialize_pm_report(r);
    CHECK(parse_pm_report(text) == r);
    CHECK(text.find(std::string(kMeanDlPrbUsed)) != std::string::npos);
    CHECK(text.find(std::string(kDlTotalAvailablePrb)) != std::string::npos);
    CHECK(text.find(std::string(kDlPdcpPduDataVolume)) != std::string::npos);
    CHECK(pm_file_name(r) == "1_20240101T000000Z.xml");
}

TEST_CASE("a report without tenants keeps its header", "[pm][codec]") {
    auto r = sample_report();
    r.slices.clear();
    const auto text = serialize_pm_report(r);
    CHECK(text.find("measCollec beginTime=\"2024-01-01T00:00:00Z\"") != std::string::npos);
    CHECK(parse_pm_report(text) == r);
}

TEST_CASE("all-zero measurements parse back as zeros", "[pm][codec]") {
    auto r = sample_report();
    r.dl_total_available_prb = 0;
    for (auto &s : r.slices) s.mean_dl_prb_used = s.dl_pdcp_volume_mbit = 0;
    CHECK(parse_pm_report(serialize_pm_report(r)) == r);
}

TEST_CASE("a missing measurement type is named in the error", "[pm][codec]") {
    const auto text = replace(serialize_pm_report(sample_report()),
                              "<measType p=\"2\">DL total available PRB</measType>", "");
    try {
        (void)parse_pm_report(text);
        FAIL("expected PmFormatError");
    } catch (const PmFormatError &e) {
        CHECK(std::string(e.what()).find("DL total available PRB") != std::string::npos);
    }
}

TEST_CASE("vendor measurements are skipped with a warning", "[pm][codec]") {
    auto text = replace(serialize_pm_report(sample_report()), "<measValue measObjLdn=\"NRCellDU=1\">",
                        "<measType p=\"9\">VS.Vendor.Counter</measType>\n"
                        "<measValue measObjLdn=\"NRCellDU=1\"><r p=\"9\">5</r>");
    std::vector<std::string> warnings;
    CHECK(parse_pm_report(text, &warnings) == sample_report());
    CHECK(warnings.size() == 1);
}

TEST_CASE("reports that break invariants are refused", "[pm][codec]") {
    auto r = sample_report();
    r.slices[0].mean_dl_prb_used = 100;
    CHECK_THROWS_AS(serialize_pm_report(r), PmFormatError);
    r = sample_report();
    r.slices[1].snssai = nrm::SNssai{1};
    CHECK_THROWS_AS(serialize_pm_report(r), PmFormatError);
    CHECK_THROWS_AS(parse_pm_report("<measCollecFile"), PmFormatError);
    CHECK_THROWS_AS(parse_pm_report(replace(serialize_pm_report(sample_report()), ">12636<", ">-1<")),
                    PmFormatError);
}

TEST_CASE("PM files round-trip random reports", "[pm][codec][property]") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> tenants(0, 5), gran(1, 3600), cell(1, 9999);
    std::uniform_int_distribution<long> seconds(0, 2'000'000'000);
    std::uniform_real_distribution<double> unit(0.0, 1.0), volume(0.0, 1e6);
    for (int i = 0; i < 1000; ++i) {
        PmReport r;
        r.cell_id = std::to_string(cell(rng));
        r.begin_time = TimePoint(std::chrono::seconds(seconds(rng)));
        r.granularity_s = gran(rng);
        r.dl_total_available_prb = 1.0 + unit(rng) * 272.0;
        const int n = tenants(rng);
        double left = r.dl_total_available_prb;
        for (int k = 0; k < n; ++k) {
            SliceMeasurements s;
            s.snssai = nrm::SNssai{std::uint32_t(k * 7 + 1)};
            s.mean_dl_prb_used = left * unit(rng);
            left -= s.mean_dl_prb_used;
            s.dl_pdcp_volume_mbit = i % 10 == 0 ? 0.0 : volume(rng);
            r.slices.push_back(s);
        }
        REQUIRE(r.violations().empty());
        REQUIRE(parse_pm_report(serialize_pm_report(r)) == r);
    }
}

TEST_CASE("ISO 8601 timestamps round-trip", "[pm]") {
    const auto t = parse_iso8601("2024-01-07T23:57:00Z");
    CHECK(format_iso8601(t) == "2024-01-07T23:57:00Z");
    CHECK(format_iso8601_basic(t) == "20240107T235700Z");
    CHECK_THROWS_AS(parse_iso8601("yesterday"), PmFormatError);
}

TEST_CASE("notifications serialize as JSON", "[pm][notification]") {
    const FileReadyNotification n{"http://127.0.0.1:8301/pm/x.xml", 1, parse_iso8601("2024-01-01T00:03:00Z")};
    const auto body = to_json(n);
    CHECK(body.find("\"file_size\":1") != std::string::npos);
    CHECK(parse_notification(body) == n);
    CHECK_THROWS_AS(parse_notification(R"({"file_size":1,"ready_time":"2024-01-01T00:03:00Z"})"), PmFormatError);
    CHECK_THROWS_AS(parse_notification("not json"), PmFormatError);
}

TEST_CASE("URLs split into host, port and path", "[pm][transfer]") {
    const auto u = parse_http_url("http://127.0.0.1:8301/pm/a.xml");
    CHECK(u.host == "127.0.0.1");
    CHECK(u.port == 8301);
    CHECK(u.path == "/pm/a.xml");
    CHECK(parse_http_url("http://host").port == 80);
    CHECK_THROWS_AS(parse_http_url("sftp://host/x"), std::invalid_argument);
}

TEST_CASE("published files are fetched byte for byte", "[pm][transfer]") {
    PmFileServer server("127.0.0.1", 0);
    server.start();
    const std::string big(2048, 'z');
    const auto n = server.publish("big.xml", big, parse_iso8601("2024-01-01T00:03:00Z"));
    CHECK(n.file_size == 2048);
    HttpFileRetriever http;
    CHECK(fetch_pm_file(n, http) == big);
    CHECK(fetch_pm_file(n, http) == fetch_pm_file(n.file_location));

    const auto one = server.publish("one.xml", "x", parse_iso8601("2024-01-01T00:06:00Z"));
    CHECK(one.file_size == 1);
    CHECK(fetch_pm_file(one, http) == "x");

    CHECK_NOTHROW(server.publish("one.xml", "x", one.ready_time));
    CHECK_THROWS_AS(server.publish("one.xml", "y", one.ready_time), std::logic_error);
    CHECK_THROWS_AS(fetch_pm_file(server.url_for("nope.xml")), MissingFileError);

    auto lying = n;
    lying.file_size = 2047;
    CHECK_THROWS_AS(fetch_pm_file(lying, http), IntegrityError);
    CHECK(server.file_count() == 2);
    server.stop();
    CHECK_THROWS_AS(fetch_pm_file(n, http), RetrievalError);
}

TEST_CASE("a listening consumer receives the notification", "[pm][transfer]") {
    Sink sink(204);
    const FileReadyNotification n{"http://127.0.0.1:1/pm/a.xml", 10, parse_iso8601("2024-01-01T00:03:00Z")};
    const auto r = notify_file_ready(sink.url(), n);
    CHECK(r.delivered);
    CHECK(r.status == 204);
    REQUIRE(sink.bodies.size() == 1);
    CHECK(parse_notification(sink.bodies[0]) == n);
}

TEST_CASE("a missing consumer is recorded and the newest notice kept", "[pm][transfer]") {
    const auto url = "http://127.0.0.1:" + std::to_string(closed_port()) + "/notify";
    FileReadyNotifier notifier(url, std::chrono::milliseconds(200));
    FileReadyNotification a{"http://h/pm/a.xml", 1, parse_iso8601("2024-01-01T00:03:00Z")};
    FileReadyNotification b{"http://h/pm/b.xml", 1, parse_iso8601("2024-01-01T00:06:00Z")};
    CHECK_FALSE(notifier.deliver(a).delivered);
    CHECK_FALSE(notifier.deliver(b).delivered);
    CHECK(notifier.failures() >= 2);
    REQUIRE(notifier.has_pending());
    CHECK(notifier.pending()->file_location == b.file_location);
}

TEST_CASE("a rejecting consumer counts as a failed delivery", "[pm][transfer]") {
    Sink sink(500);
    FileReadyNotifier notifier(sink.url());
    const FileReadyNotification n{"http://h/pm/a.xml", 1, parse_iso8601("2024-01-01T00:03:00Z")};
    const auto r = notifier.deliver(n);
    CHECK_FALSE(r.delivered);
    CHECK(r.status == 500);
    CHECK(notifier.has_pending());
}

TEST_CASE("the pending notice goes out before the next one", "[pm][transfer]") {
    Sink sink(204);
    FileReadyNotifier notifier(sink.url());
    FileReadyNotification a{"http://h/pm/a.xml", 1, parse_iso8601("2024-01-01T00:03:00Z")};
    FileReadyNotification b{"http://h/pm/b.xml", 1, parse_iso8601("2024-01-01T00:06:00Z")};
    CHECK(notifier.deliver(a).delivered);
    CHECK(notifier.deliver(b).delivered);
    CHECK_FALSE(notifier.has_pending());
    CHECK(sink.bodies.size() == 2);
}
