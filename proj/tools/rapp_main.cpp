// rapp: capacity-sharing rApp.
#include <fstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "capshare/config/config.hpp"
#include "capshare/policy/persistence.hpp"
#include "capshare/rapp/rapp.hpp"
#include "signals.hpp"

using namespace capshare;

int main(int argc, char **argv) {
    CLI::App app{"Capacity-sharing rApp"};
    app.require_subcommand(1);
    auto *run = app.add_subcommand("run", "Run the inference loop");
    std::string config_path, policy_dir, log_path;
    long max_periods = -1;
    int connect_retries = 50;
    std::string log_level = "info";
    run->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    run->add_option("--policies", policy_dir, "Trained policy directory")->required();
    run->add_option("--log", log_path, "Loop record log (JSON lines)")->required();
    run->add_option("--max-periods", max_periods, "Stop after this many periods per cell");
    run->add_option("--connect-retries", connect_retries, "Startup connection attempts (100 ms apart)");
    run->add_option("--log-level", log_level, "trace, debug, info, warn, error");
    CLI11_PARSE(app, argc, argv);

    spdlog::set_level(spdlog::level::from_str(log_level));
    tools::install_stop_handlers();
    try {
        const auto cfg = config::load_config(config_path);
        auto policy = policy::load_policy(policy_dir);
        std::ofstream log(log_path, std::ios::app);
        if (!log) throw std::runtime_error("cannot open " + log_path);

        rapp::Rapp r(cfg.rapp, std::move(policy), [&](const rapp::LoopRecord &rec) {
            log << rec.to_json() << '\n';
            log.flush();
        });
        for (int attempt = 1;; ++attempt) {
            try {
                r.start();
                break;
            } catch (const std::exception &e) {
                if (attempt >= connect_retries || tools::g_stop) throw;
                spdlog::debug("startup attempt {} failed: {}", attempt, e.what());
                std::this_thread::sleep_for(std::chrono::milliseconds(100));
            }
        }
        r.run(tools::g_stop, max_periods);
        r.stop();
        spdlog::info("rapp done: {} loop records", r.records().size());
    } catch (const policy::PolicyLoadError &e) {
        spdlog::error("cannot load policies: {}", e.what());
        return 2;
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
