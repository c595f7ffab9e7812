#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "capshare/policy/qnetwork.hpp"
#include "capshare/policy/replay_buffer.hpp"

namespace capshare::policy {

enum class OptimizerKind { sgd, adam };

struct Hyperparameters {
    long initial_collect_steps = 50;
    long max_train_steps = 200'000;
    std::size_t buffer_len = 10'000'000;
    std::size_t batch_size = 512;
    double learning_rate = 1e-4;
    double discount = 0.9;
    double epsilon = 0.1;
    // Hard copy of the online network into the target network, in train steps.
    long target_sync_steps = 500;
    int hidden_units = 100;
    OptimizerKind optimizer = OptimizerKind::sgd;

    // Full-size training setup.
    static Hyperparameters full();
    // Small enough to train in seconds on one core.
    static Hyperparameters desk();

    std::vector<std::string> violations() const;
    bool operator==(const Hyperparameters &) const = default;
};

std::unique_ptr<Optimizer> make_optimizer(const Hyperparameters &hyper);

/// One optimizer step on the mean squared TD error of a uniformly drawn mini-batch,
/// with targets r + discount * max_a target(s', a). Returns nullopt (and
/// leaves the network untouched) while the buffer holds fewer than
/// batch_size transitions.
std::optional<double> dqn_train_step(const ReplayBuffer &buffer, QNetwork &net,
                                     const QNetwork &target, const Hyperparameters &hyper,
                                     std::mt19937_64 &rng, Optimizer &optimizer);

// Plain SGD at hyper.learning_rate.
std::optional<double> dqn_train_step(const ReplayBuffer &buffer, QNetwork &net,
                                     const QNetwork &target, const Hyperparameters &hyper,
                                     std::mt19937_64 &rng);

} // namespace capshare::policy
