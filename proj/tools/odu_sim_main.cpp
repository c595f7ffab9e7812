// odu-sim: simulated O-DU serving NETCONF and PM files.
#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "capshare/config/config.hpp"
#include "capshare/odu/service.hpp"
#include "signals.hpp"

using namespace capshare;

int main(int argc, char **argv) {
    CLI::App app{"Simulated O-DU: NETCONF server, PM file server and traffic model"};
    app.require_subcommand(1);
    auto *serve = app.add_subcommand("serve", "Run the O-DU");
    std::string config_path;
    std::uint64_t seed = 1;
    double accel = -1.0;
    long steps = -1;
    std::string log_level = "info";
    serve->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    serve->add_option("--seed", seed, "Traffic noise seed");
    serve->add_option("--accel", accel,
                      "Clock acceleration; 0 runs as fast as possible in lockstep with the rApp")
        ->check(CLI::NonNegativeNumber);
    serve->add_option("--steps", steps, "Periods to simulate (default: until SIGTERM)");
    serve->add_option("--log-level", log_level, "trace, debug, info, warn, error");
    CLI11_PARSE(app, argc, argv);

    spdlog::set_level(spdlog::level::from_str(log_level));
    tools::install_stop_handlers();
    try {
        auto cfg = config::load_config(config_path);
        if (accel >= 0.0) cfg.odu.acceleration = accel;
        odu::OduService service(cfg.scenario, cfg.tenant_profiles(), seed, cfg.odu);
        service.start();
        const auto stats = service.run(steps, &tools::g_stop);
        service.stop();
        spdlog::info("odu done: {} steps, {} reports, {} notification failures, {} lockstep timeouts",
                     stats.steps, stats.reports, stats.notify_failures, stats.lockstep_timeouts);
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
