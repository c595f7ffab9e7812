#include "capshare/policy/trainer.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "capshare/sla/metrics.hpp"

namespace capshare::policy {

namespace {

using Observation = CapacitySharingEnv::Observation;

std::vector<StateVector> observe(const Observation &obs, const nrm::ScenarioConfig &scenario,
                                 std::span<const nrm::RRMPolicyRatio> ratios) {
    std::vector<StateVector> states;
    states.reserve(ratios.size());
    for (std::size_t k = 0; k < ratios.size(); ++k)
        states.push_back(featurize(obs.report, scenario.tenants[k].sla, ratios[k], scenario.cell,
                                   scenario.delta_t_s));
    return states;
}

std::vector<double> rewards(const Observation &obs, const nrm::ScenarioConfig &scenario,
                            double weight) {
    std::vector<double> out;
    const auto &truth = obs.truth;
    for (std::size_t k = 0; k < scenario.tenants.size(); ++k)
        out.push_back(compute_reward(truth.served_mbps[k], truth.offered_mbps[k],
                                     truth.assigned_mbps[k], scenario.tenants[k].sla,
                                     scenario.cell, weight));
    return out;
}

struct Agent {
    TenantPolicy policy;
    QNetwork target;
    ReplayBuffer buffer;
    std::unique_ptr<Optimizer> optimizer;
    long train_steps = 0;
};

template <class ChooseAction>
Evaluation rollout(const EnvironmentOptions &env_options, long steps, std::uint64_t seed,
                   double weight, ChooseAction choose) {
    CapacitySharingEnv env(env_options);
    const auto &scenario = env.scenario();
    std::mt19937_64 rng(seed);
    auto obs = env.reset(rng);
    auto ratios = obs.truth.ratios;

    Evaluation eval;
    eval.tenant_mean_reward.assign(scenario.tenants.size(), 0.0);
    for (long t = 0; t < steps; ++t) {
        const auto states = observe(obs, scenario, ratios);
        std::vector<nrm::RRMPolicyRatio> next;
        for (std::size_t k = 0; k < ratios.size(); ++k)
            next.push_back(apply_action(ratios[k], choose(k, states[k], rng),
                                        scenario.tenants[k].sla, scenario.cell));
        obs = env.step(next);
        ratios = std::move(next);
        const auto r = rewards(obs, scenario, weight);
        for (std::size_t k = 0; k < r.size(); ++k) eval.tenant_mean_reward[k] += r[k];
        eval.trace.push_back(obs.truth);
        if (env.episode_over()) {
            obs = env.reset(rng);
            ratios = obs.truth.ratios;
        }
    }
    double total = 0.0;
    for (auto &m : eval.tenant_mean_reward) {
        m /= double(std::max(steps, 1L));
        total += m;
    }
    eval.mean_reward = total / double(std::max<std::size_t>(eval.tenant_mean_reward.size(), 1));
    return eval;
}

} // namespace

TrainingResult train_policy(const EnvironmentOptions &env_options, const TrainingOptions &options,
                            std::uint64_t seed) {
    const auto &hyper = options.hyper;
    if (auto v = hyper.violations(); !v.empty()) throw TrainingError("hyperparameters: " + v.front());
    if (!options.actions.valid()) throw TrainingError("action set must contain 0 and be symmetric");

    std::mt19937_64 master(seed);
    std::mt19937_64 init_rng(master()), env_rng(master()), explore_rng(master()),
        sample_rng(master());
    const std::uint64_t validation_seed = master();

    CapacitySharingEnv env(env_options);
    const auto &scenario = env.scenario();
    const int n_actions = int(options.actions.size());

    std::vector<Agent> agents;
    for (const auto &tenant : scenario.tenants) {
        TenantPolicy p{tenant.snssai, options.actions, FeatureNormalization::standard(),
                       QNetwork::random(int(kStateSize), hyper.hidden_units, n_actions, init_rng)};
        QNetwork target = p.network;
        agents.push_back(Agent{std::move(p), std::move(target), ReplayBuffer(hyper.buffer_len),
                                 make_optimizer(hyper)});
    }

    TrainingStats stats;
    stats.losses.resize(agents.size());

    auto obs = env.reset(env_rng);
    auto ratios = obs.truth.ratios;
    auto states = observe(obs, scenario, ratios);
    std::uniform_int_distribution<int> random_action(0, n_actions - 1);

    const auto &validation = options.validation;
    std::optional<TrainedPolicy> best;
    double best_score = -std::numeric_limits<double>::infinity();
    auto validate = [&](long step) {
        TrainedPolicy current;
        for (const auto &a : agents) current.tenants.push_back(a.policy);
        const auto eval = evaluate_policy(env_options, current, validation.steps, validation_seed,
                                          options.overprovision_weight);
        const auto series = sla::series_from_records(scenario, eval.trace);
        double worst = 1.0;
        for (std::size_t k = 0; k < series.tenants.size(); ++k)
            worst = std::min(worst, sla::satisfaction_ratio(series, k));
        const double score =
            worst + validation.utilization_weight * sla::capacity_utilization(series);
        stats.validation_scores.emplace_back(step, score);
        if (score > best_score) {
            best_score = score;
            best = std::move(current);
            stats.selected_step = step;
        }
    };

    const long total_steps = hyper.initial_collect_steps + hyper.max_train_steps;
    for (long step = 0; step < total_steps; ++step) {
        const bool collecting = step < hyper.initial_collect_steps;

        std::vector<std::size_t> actions(agents.size());
        std::vector<nrm::RRMPolicyRatio> next;
        for (std::size_t k = 0; k < agents.size(); ++k) {
            if (collecting) {
                actions[k] = std::size_t(random_action(explore_rng));
            } else {
                const Eigen::VectorXd q = agents[k].policy.action_values(states[k]);
                actions[k] = select_action(std::span<const double>(q.data(), std::size_t(q.size())),
                                           hyper.epsilon, explore_rng);
            }
            next.push_back(apply_action(ratios[k], options.actions.deltas[actions[k]],
                                        scenario.tenants[k].sla, scenario.cell));
        }

        obs = env.step(next);
        ++stats.env_steps;
        const auto r = rewards(obs, scenario, options.overprovision_weight);
        auto next_states = observe(obs, scenario, next);
        for (std::size_t k = 0; k < agents.size(); ++k) {
            const auto &norm = agents[k].policy.normalization;
            agents[k].buffer.push(
                {norm.apply(states[k]), actions[k], r[k] + options.reward_offset, norm.apply(next_states[k])});
        }
        ratios = std::move(next);
        states = std::move(next_states);

        if (!collecting) {
            for (std::size_t k = 0; k < agents.size(); ++k) {
                auto &agent = agents[k];
                const auto loss = dqn_train_step(agent.buffer, agent.policy.network, agent.target,
                                                 hyper, sample_rng, *agent.optimizer);
                if (!loss) continue;
                if (!std::isfinite(*loss) || !agent.policy.network.all_finite())
                    throw TrainingError("non-finite loss for snssai " +
                                        std::to_string(agent.policy.snssai.id) + " at step " +
                                        std::to_string(step) + "; lower the learning rate");
                stats.losses[k].push_back(*loss);
                if (++agent.train_steps % hyper.target_sync_steps == 0)
                    agent.target = agent.policy.network;
            }
            stats.train_steps = agents.empty() ? 0 : agents.front().train_steps;
        }

        if (env.episode_over()) {
            obs = env.reset(env_rng);
            ratios = obs.truth.ratios;
            states = observe(obs, scenario, ratios);
        }

        if (validation.interval > 0 && !collecting &&
            (step + 1 - hyper.initial_collect_steps) % validation.interval == 0)
            validate(step + 1);

        if (options.early_stop_loss > 0.0 && stats.train_steps >= 1000) {
            bool converged = true;
            for (const auto &l : stats.losses) {
                const double recent =
                    std::accumulate(l.end() - 1000, l.end(), 0.0) / 1000.0;
                converged = converged && recent < options.early_stop_loss;
            }
            if (converged) {
                stats.early_stopped = true;
                break;
            }
        }
    }

    // The final networks compete with the snapshots.
    if (validation.interval > 0 &&
        (stats.validation_scores.empty() || stats.validation_scores.back().first != stats.env_steps))
        validate(stats.env_steps);

    TrainingResult result;
    for (auto &agent : agents) {
        stats.buffer_sizes.push_back(agent.buffer.size());
        result.policy.tenants.push_back(std::move(agent.policy));
    }
    if (best) result.policy = std::move(*best);
    result.stats = std::move(stats);
    return result;
}

Evaluation evaluate_policy(const EnvironmentOptions &env_options, const TrainedPolicy &policy,
                           long steps, std::uint64_t seed, double overprovision_weight) {
    std::vector<const TenantPolicy *> agents;
    for (const auto &t : env_options.scenario.tenants) {
        const auto *p = policy.find(t.snssai);
        if (p == nullptr)
            throw std::out_of_range("no policy for snssai " + std::to_string(t.snssai.id));
        agents.push_back(p);
    }
    return rollout(env_options, steps, seed, overprovision_weight,
                   [&](std::size_t k, const StateVector &s, std::mt19937_64 &) {
                       return agents[k]->actions.deltas[agents[k]->greedy_action(s)];
                   });
}

Evaluation evaluate_random(const EnvironmentOptions &env_options, const ActionSet &actions,
                           long steps, std::uint64_t seed, double overprovision_weight) {
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    return rollout(env_options, steps, seed, overprovision_weight,
                   [&](std::size_t, const StateVector &, std::mt19937_64 &rng) {
                       return actions.deltas[pick(rng)];
                   });
}

} // namespace capshare::policy
