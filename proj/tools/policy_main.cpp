// policy: train and evaluate DQN capacity-sharing policies.
#include <chrono>
#include <fstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "capshare/config/config.hpp"
#include "capshare/policy/persistence.hpp"
#include "capshare/policy/trainer.hpp"
#include "capshare/sla/metrics.hpp"

using namespace capshare;

namespace {

int train(const std::string &config_path, const std::string &out, std::uint64_t seed) {
    const auto cfg = config::load_config(config_path);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = policy::train_policy(cfg.environment(), cfg.training.options, seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    policy::save_policy(result.policy, out);

    const auto &s = result.stats;
    nlohmann::json losses = nlohmann::json::array();
    for (const auto &l : s.losses) {
        double tail = 0.0;
        const std::size_t n = std::min<std::size_t>(l.size(), 1000);
        for (std::size_t i = l.size() - n; i < l.size(); ++i) tail += l[i];
        losses.push_back(n > 0 ? tail / double(n) : 0.0);
    }
    nlohmann::json validation = nlohmann::json::array();
    for (const auto &[step, score] : s.validation_scores) validation.push_back({step, score});
    const nlohmann::json summary{{"seed", seed},
                                 {"env_steps", s.env_steps},
                                 {"train_steps", s.train_steps},
                                 {"early_stopped", s.early_stopped},
                                 {"mean_loss_last_1000", losses},
                                 {"validation", validation},
                                 {"selected_step", s.selected_step},
                                 {"seconds", secs}};
    std::ofstream(std::filesystem::path(out) / "training.json") << summary.dump(2) << '\n';
    spdlog::info("trained {} agents for {} steps in {:.1f} s; policy in {}", result.policy.tenants.size(),
                 s.env_steps, secs, out);
    if (s.selected_step >= 0) spdlog::info("kept the snapshot from step {}", s.selected_step);
    return 0;
}

int eval(const std::string &policy_dir, long steps, const std::string &config_path, std::uint64_t seed) {
    const auto cfg = config_path.empty() ? config::BenchConfig{} : config::load_config(config_path);
    const auto policy = policy::load_policy(policy_dir);
    auto env = cfg.environment();
    const auto greedy = policy::evaluate_policy(env, policy, steps, seed, cfg.training.options.overprovision_weight);
    const auto random = policy::evaluate_random(env, policy.tenants.front().actions, steps, seed,
                                                cfg.training.options.overprovision_weight);
    const auto series = sla::series_from_records(cfg.scenario, greedy.trace);
    std::printf("steps %ld\n", steps);
    std::printf("greedy mean reward %.4f\n", greedy.mean_reward);
    std::printf("random mean reward %.4f\n", random.mean_reward);
    for (std::size_t k = 0; k < series.tenants.size(); ++k)
        std::printf("tenant %u satisfaction %.3f\n", series.tenants[k].id, sla::satisfaction_ratio(series, k));
    std::printf("capacity utilization %.3f\n", sla::capacity_utilization(series));
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Train and evaluate capacity-sharing policies"};
    app.require_subcommand(1);

    std::string config_path, out, policy_dir;
    std::uint64_t seed = 1;
    long steps = 500;

    auto *tr = app.add_subcommand("train", "Train one DQN agent per tenant");
    tr->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    tr->add_option("--out", out, "Output policy directory")->required();
    tr->add_option("--seed", seed, "Training seed");

    auto *ev = app.add_subcommand("eval", "Greedy rollout against a uniform-random baseline");
    ev->add_option("--policy", policy_dir, "Policy directory")->required();
    ev->add_option("--steps", steps, "Evaluation periods")->check(CLI::PositiveNumber);
    ev->add_option("--config", config_path, "JSON config file (default: reference scenario)");
    ev->add_option("--seed", seed, "Evaluation seed");
    CLI11_PARSE(app, argc, argv);

    try {
        if (tr->parsed()) return train(config_path, out, seed);
        return eval(policy_dir, steps, config_path, seed);
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return 1;
    }
}
