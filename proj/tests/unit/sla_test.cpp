#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "capshare/nrm/allocation.hpp"
#include "capshare/sla/metrics.hpp"
#include "capshare/sla/report.hpp"

using namespace capshare;
using namespace capshare::sla;
using Catch::Approx;

namespace {

SlaTimeSeries series_with(std::size_t steps, std::size_t tenants) {
    SlaTimeSeries s;
    for (std::size_t k = 0; k < tenants; ++k) s.tenants.push_back(nrm::SNssai{std::uint32_t(k + 1)});
    for (std::size_t i = 0; i < steps; ++i) {
        s.steps.push_back(std::int64_t(i));
        s.samples.emplace_back(tenants);
    }
    return s;
}

SlaTimeSeries random_series(std::mt19937_64 &rng, std::size_t steps) {
    std::uniform_real_distribution<double> u(0.0, 58.5);
    auto s = series_with(steps, 2);
    for (auto &row : s.samples)
        for (auto &x : row) {
            x.assigned_mbps = u(rng);
            x.offered_mbps = u(rng);
            x.served_mbps = std::min(x.offered_mbps, x.assigned_mbps);
            x.satisfied = sla_satisfied(x.served_mbps, x.offered_mbps, 40.0);
        }
    return s;
}

std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::stringstream b;
    b << in.rdbuf();
    return b.str();
}

std::filesystem::path temp_dir(const std::string &name) {
    auto d = std::filesystem::temp_directory_path() / ("capshare_sla_test_" + name);
    std::filesystem::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("satisfaction predicate uses min(offered, SAGBR)", "[sla]") {
    CHECK(sla_satisfied(70.2, 100, 70.2));
    CHECK(sla_satisfied(30, 30, 70.2));
    CHECK(sla_satisfied(70.2 - 5e-7, 100, 70.2));
    CHECK_FALSE(sla_satisfied(70.2 - 2e-6, 100, 70.2));
    CHECK_FALSE(sla_satisfied(29, 30, 70.2));
}

TEST_CASE("satisfaction ratio counts satisfied steps", "[sla]") {
    auto s = series_with(10, 1);
    for (std::size_t i = 0; i < 10; ++i) s.samples[i][0].satisfied = i != 3;
    CHECK(satisfaction_ratio(s, 0) == Approx(0.9));
    for (auto &row : s.samples) row[0].satisfied = true;
    CHECK(satisfaction_ratio(s, 0) == 1.0);
    CHECK_THROWS_AS(satisfaction_ratio(series_with(0, 1), 0), nrm::DomainError);
}

TEST_CASE("utilization is served over assigned per step", "[sla]") {
    auto s = series_with(1, 2);
    s.samples[0][0] = {50, 50, 60, true};
    s.samples[0][1] = {30, 30, 40, true};
    CHECK(capacity_utilization(s) == Approx(0.8));

    auto full = series_with(5, 2);
    for (auto &row : full.samples)
        for (auto &x : row) x = {10, 10, 10, true};
    CHECK(capacity_utilization(full) == 1.0);

    auto idle = series_with(3, 2);
    CHECK_THROWS_AS(capacity_utilization(idle), nrm::DomainError);
    idle.samples[1][0] = {5, 5, 10, true};
    CHECK(capacity_utilization(idle) == Approx(0.5));

    auto over = series_with(1, 1);
    over.samples[0][0] = {10, 10 + 1e-12, 10, true};
    CHECK(capacity_utilization(over) == 1.0);
}

TEST_CASE("metrics stay in [0,1] and ignore step order", "[sla][property]") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        auto s = random_series(rng, 1 + std::size_t(i));
        const double sat = satisfaction_ratio(s, 0), util = capacity_utilization(s);
        REQUIRE(sat >= 0.0);
        REQUIRE(sat <= 1.0);
        REQUIRE(util >= 0.0);
        REQUIRE(util <= 1.0);
        std::shuffle(s.samples.begin(), s.samples.end(), rng);
        REQUIRE(satisfaction_ratio(s, 0) == Approx(sat).epsilon(1e-12));
    }
}

TEST_CASE("a covered dedicated share is always marked satisfied", "[sla][property]") {
    const auto scenario = nrm::reference_scenario();
    const auto slas = scenario.slas();
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<int> ratio(0, 100);
    std::uniform_real_distribution<double> load(0.0, 120.0);
    std::vector<odu::StepRecord> records;
    for (int i = 0; i < 5000; ++i) {
        const int r1 = ratio(rng), r2 = std::uniform_int_distribution<int>(0, 100 - r1)(rng);
        odu::StepRecord rec;
        rec.step = i;
        rec.ratios = {{nrm::SNssai{1}, r1}, {nrm::SNssai{2}, r2}};
        rec.offered_mbps = {load(rng), load(rng)};
        rec.served_mbps = nrm::allocate_capacity(rec.offered_mbps, rec.ratios, scenario.cell, slas);
        rec.assigned_mbps = {r1 * 1.17, r2 * 1.17};
        records.push_back(rec);
    }
    const auto series = series_from_records(scenario, records);
    for (std::size_t i = 0; i < records.size(); ++i)
        for (std::size_t k = 0; k < 2; ++k) {
            const double need = std::min(records[i].offered_mbps[k], slas[k].sagbr_mbps);
            if (records[i].ratios[k].dedicated_ratio * 117.0 / 100.0 >= need)
                REQUIRE(series.samples[i][k].satisfied);
        }
}

TEST_CASE("series invariants are checked", "[sla]") {
    auto s = series_with(2, 2);
    CHECK(s.violations(117).empty());
    s.samples[1][0].assigned_mbps = 200;
    CHECK_FALSE(s.violations(117).empty());
    s = series_with(2, 2);
    s.samples[0].pop_back();
    CHECK_FALSE(s.violations(117).empty());
}

TEST_CASE("the report CSV reproduces the metrics exactly", "[sla][report][property]") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 50; ++i) {
        const auto s = random_series(rng, 1 + std::size_t(i) * 7);
        std::stringstream csv;
        write_report_csv(s, csv);
        const auto back = read_report_csv(csv);
        REQUIRE(back == s);
        const auto a = compute_report(s), b = compute_report(back);
        REQUIRE(a.satisfaction == b.satisfaction);
        REQUIRE(a.utilization == b.utilization);
    }
}

TEST_CASE("emit_report writes the CSV, metrics and one plot per tenant", "[sla][report]") {
    std::mt19937_64 rng(1);
    const auto s = random_series(rng, 10);
    const auto dir = temp_dir("emit");
    const auto report = emit_report(s, dir, 117.0, 180.0);

    const auto csv = read_file(report.csv_path);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 10 * 2);
    CHECK(csv.rfind(kReportCsvHeader, 0) == 0);

    const auto metrics = nlohmann::json::parse(read_file(report.metrics_path));
    CHECK(metrics.at("satisfaction_ratio").size() == 2);
    CHECK(metrics.at("capacity_utilization").get<double>() == report.utilization);
    CHECK(metrics.at("steps") == 10);

    REQUIRE(report.plot_paths.size() == 2);
    for (const auto &p : report.plot_paths) CHECK(read_file(p).find("<svg") != std::string::npos);

    const auto again = emit_report(s, dir, 117.0, 180.0);
    CHECK(read_file(again.csv_path) == csv);

    std::ifstream in(report.csv_path);
    const auto recomputed = compute_report(read_report_csv(in));
    CHECK(recomputed.satisfaction == report.satisfaction);
    CHECK(recomputed.utilization == report.utilization);
    std::filesystem::remove_all(dir);
}

TEST_CASE("emit_report refuses empty series and unwritable places", "[sla][report]") {
    CHECK_THROWS_AS(emit_report(series_with(0, 2), temp_dir("empty"), 117, 180), nrm::DomainError);
    std::mt19937_64 rng(1);
    const auto dir = temp_dir("blocked");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    CHECK_THROWS(emit_report(random_series(rng, 3), dir / "file" / "sub", 117, 180));
    std::filesystem::remove_all(dir);
}

TEST_CASE("malformed report CSVs are rejected", "[sla][report]") {
    std::stringstream wrong_header("a,b,c\n");
    CHECK_THROWS(read_report_csv(wrong_header));
    std::stringstream short_row(std::string(kReportCsvHeader) + "\n0,1,2\n");
    CHECK_THROWS(read_report_csv(short_row));
}
