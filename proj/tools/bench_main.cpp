// bench: end-to-end runs and SLA reports.
#include <cstdio>
#include <fstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "capshare/bench/orchestrator.hpp"
#include "capshare/sla/report.hpp"

using namespace capshare;

namespace {

void print(const sla::RunReport &r) {
    std::printf("steps %zu%s\n", r.steps, r.partial ? " (partial)" : "");
    for (std::size_t k = 0; k < r.tenants.size(); ++k)
        std::printf("tenant %u satisfaction %.4f\n", r.tenants[k].id, r.satisfaction[k]);
    std::printf("capacity utilization %.4f\n", r.utilization);
    if (!r.note.empty()) std::printf("note: %s\n", r.note.c_str());
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Capacity-sharing benchmark"};
    app.require_subcommand(1);

    std::string config_path, policy_dir, out, csv, tools_dir;
    long days = 7;
    std::uint64_t seed = 1;
    bool free_ports = false;

    auto *run = app.add_subcommand("run", "Run odu-sim and rapp together and report SLA metrics");
    run->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    run->add_option("--policies", policy_dir, "Trained policy directory")->required();
    run->add_option("--days", days, "Simulated days")->check(CLI::NonNegativeNumber);
    run->add_option("--seed", seed, "Traffic seed");
    run->add_option("--out", out, "Output directory")->required();
    run->add_flag("--free-ports", free_ports, "Use free ports instead of the configured ones");
    run->add_option("--tools-dir", tools_dir, "Where odu-sim and rapp live (default: next to bench)");

    auto *rep = app.add_subcommand("report", "Recompute metrics from a report CSV");
    rep->add_option("--csv", csv, "series.csv written by bench run")->required()->check(CLI::ExistingFile);
    CLI11_PARSE(app, argc, argv);

    try {
        if (rep->parsed()) {
            std::ifstream in(csv);
            print(sla::compute_report(sla::read_report_csv(in)));
            return 0;
        }
        bench::RunOptions o;
        o.config = config::load_config(config_path);
        o.policy_dir = policy_dir;
        o.out_dir = out;
        o.seed = seed;
        o.steps = days * 86400L / o.config.scenario.delta_t_s;
        o.free_ports = free_ports;
        o.tools_dir = tools_dir;
        const auto report = bench::orchestrate_run(o);
        print(report);
        return report.partial ? 3 : 0;
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return 1;
    }
}
