#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "capshare/bench/orchestrator.hpp"
#include "capshare/policy/persistence.hpp"
#include "capshare/policy/trainer.hpp"

using namespace capshare;

namespace {

std::filesystem::path tools_dir() {
    const char *d = std::getenv("CAPSHARE_TOOLS_DIR");
    return d ? d : bench::executable_dir() / ".." / "tools";
}

std::filesystem::path temp_dir(const std::string &name) {
    auto d = std::filesystem::temp_directory_path() / ("capshare_bench_test_" + name);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

// A quickly trained policy; the loop mechanics matter here, not its quality.
std::filesystem::path small_policy() {
    static const auto dir = [] {
        const auto d = temp_dir("policy");
        config::BenchConfig c;
        auto o = c.training.options;
        o.hyper.max_train_steps = 500;
        policy::save_policy(policy::train_policy(c.environment(), o, 1).policy, d);
        return d;
    }();
    return dir;
}

bench::RunOptions options(const std::string &name, long steps) {
    bench::RunOptions o;
    o.policy_dir = small_policy();
    o.steps = steps;
    o.out_dir = temp_dir(name);
    o.tools_dir = tools_dir();
    o.free_ports = true;
    o.timeout = std::chrono::seconds(300);
    return o;
}

} // namespace

TEST_CASE("a simulated day records 480 steps", "[bench]") {
    const auto o = options("day", 86400 / 180);
    const auto report = bench::orchestrate_run(o);
    CHECK_FALSE(report.partial);
    CHECK(report.steps == 480);
    CHECK(std::filesystem::exists(o.out_dir / "series.csv"));
    CHECK(std::filesystem::exists(o.out_dir / "metrics.json"));
    CHECK(std::filesystem::exists(o.out_dir / "rapp_loop.jsonl"));
    for (double s : report.satisfaction) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("zero duration is an empty-series domain error", "[bench]") {
    CHECK_THROWS_AS(bench::orchestrate_run(options("zero", 0)), nrm::DomainError);
}

TEST_CASE("a component that stops early yields a partial report", "[bench]") {
    // Stand-in tools directory whose rapp gives up after a few periods.
    const auto fake = temp_dir("fake_tools");
    std::filesystem::create_symlink(tools_dir() / "odu-sim", fake / "odu-sim");
    {
        std::ofstream s(fake / "rapp");
        s << "#!/bin/sh\nexec \"" << (tools_dir() / "rapp").string() << "\" \"$@\" --max-periods 20\n";
    }
    std::filesystem::permissions(fake / "rapp", std::filesystem::perms::owner_all);
    auto o = options("partial", 480);
    o.tools_dir = fake;
    const auto report = bench::orchestrate_run(o);
    CHECK(report.partial);
    CHECK(report.steps < 480);
    CHECK(report.steps >= 20);
    CHECK_FALSE(report.note.empty());
}
