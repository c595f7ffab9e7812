#pragma once

#include <cstdint>
#include <utility>
#include <stdexcept>
#include <vector>

#include "capshare/odu/simulator.hpp"
#include "capshare/policy/actions.hpp"
#include "capshare/policy/dqn.hpp"
#include "capshare/policy/environment.hpp"
#include "capshare/policy/policy.hpp"
#include "capshare/policy/reward.hpp"

namespace capshare::policy {

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainingOptions {
    Hyperparameters hyper = Hyperparameters::desk();
    ActionSet actions = ActionSet::three(3);
    double overprovision_weight = kDefaultOverprovisionWeight;
    // Stop once every agent's mean loss over the last 1000 train steps falls
    // below this value. 0 disables early stopping.
    double early_stop_loss = 0.0;
    // Added to every stored reward. A constant shift leaves the optimal policy
    // unchanged and keeps Q-values near zero, where the small reward gaps
    // between neighbouring ratios are easier to resolve.
    double reward_offset = 0.0;
    // Every `interval` env steps of training, roll the greedy policy out for
    // `steps` periods on a fixed validation seed and keep the snapshot with
    // the best min_k satisfaction_k + utilization_weight * utilization.
    // interval 0 keeps the final networks.
    struct Validation {
        long interval = 0;
        long steps = 3360;
        double utilization_weight = 0.5;
    } validation;
};

struct TrainingStats {
    long env_steps = 0;
    long train_steps = 0;
    bool early_stopped = false;
    std::vector<std::size_t> buffer_sizes;
    // Per agent, one entry per train step.
    std::vector<std::vector<double>> losses;
    // (env step, score) per validation rollout.
    std::vector<std::pair<long, double>> validation_scores;
    long selected_step = -1;
};

struct TrainingResult {
    TrainedPolicy policy;
    TrainingStats stats;
};

/// Independent DQN per tenant. Each agent sees its own state, picks its own
/// action, keeps a private replay buffer and is rewarded for its own tenant.
/// The first initial_collect_steps periods use uniformly random actions.
TrainingResult train_policy(const EnvironmentOptions &env_options, const TrainingOptions &options,
                            std::uint64_t seed);

struct Evaluation {
    double mean_reward = 0.0;
    std::vector<double> tenant_mean_reward;
    std::vector<odu::StepRecord> trace;
};

/// Greedy rollout of `policy` for `steps` periods.
Evaluation evaluate_policy(const EnvironmentOptions &env_options, const TrainedPolicy &policy,
                           long steps, std::uint64_t seed,
                           double overprovision_weight = kDefaultOverprovisionWeight);

/// Same rollout with every agent choosing uniformly from `actions`.
Evaluation evaluate_random(const EnvironmentOptions &env_options, const ActionSet &actions,
                           long steps, std::uint64_t seed,
                           double overprovision_weight = kDefaultOverprovisionWeight);

} // namespace capshare::policy
