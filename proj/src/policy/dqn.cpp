#include "capshare/policy/dqn.hpp"

namespace capshare::policy {

Hyperparameters Hyperparameters::full() { return Hyperparameters{}; }

Hyperparameters Hyperparameters::desk() {
    Hyperparameters h;
    h.max_train_steps = 10'000;
    h.buffer_len = 100'000;
    h.batch_size = 64;
    h.learning_rate = 1e-3;
    h.optimizer = OptimizerKind::adam;
    return h;
}

std::vector<std::string> Hyperparameters::violations() const {
    std::vector<std::string> out;
    if (initial_collect_steps < 0) out.emplace_back("initial_collect_steps must be >= 0");
    if (max_train_steps <= 0) out.emplace_back("max_train_steps must be positive");
    if (buffer_len == 0) out.emplace_back("buffer_len must be positive");
    if (batch_size == 0) out.emplace_back("batch_size must be positive");
    if (batch_size > buffer_len) out.emplace_back("batch_size exceeds buffer_len");
    if (!(learning_rate > 0.0)) out.emplace_back("learning_rate must be positive");
    if (!(discount >= 0.0 && discount < 1.0)) out.emplace_back("discount must be in [0,1)");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) out.emplace_back("epsilon must be in [0,1]");
    if (target_sync_steps <= 0) out.emplace_back("target_sync_steps must be positive");
    if (hidden_units <= 0) out.emplace_back("hidden_units must be positive");
    return out;
}

std::unique_ptr<Optimizer> make_optimizer(const Hyperparameters &hyper) {
    if (hyper.optimizer == OptimizerKind::adam)
        return std::make_unique<AdamOptimizer>(hyper.learning_rate);
    return std::make_unique<SgdOptimizer>(hyper.learning_rate);
}

std::optional<double> dqn_train_step(const ReplayBuffer &buffer, QNetwork &net,
                                     const QNetwork &target, const Hyperparameters &hyper,
                                     std::mt19937_64 &rng) {
    SgdOptimizer sgd(hyper.learning_rate);
    return dqn_train_step(buffer, net, target, hyper, rng, sgd);
}

std::optional<double> dqn_train_step(const ReplayBuffer &buffer, QNetwork &net,
                                     const QNetwork &target, const Hyperparameters &hyper,
                                     std::mt19937_64 &rng, Optimizer &optimizer) {
    const std::size_t batch = hyper.batch_size;
    if (batch == 0 || buffer.size() < batch) return std::nullopt;

    const auto idx = buffer.sample_indices(batch, rng);
    const Eigen::Index n = Eigen::Index(batch);
    Eigen::MatrixXd states(kStateSize, n), next(kStateSize, n);
    Eigen::VectorXd rewards(n);
    std::vector<std::size_t> actions(batch);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto &t = buffer.at(idx[j]);
        for (std::size_t i = 0; i < kStateSize; ++i) {
            states(Eigen::Index(i), j) = t.state[i];
            next(Eigen::Index(i), j) = t.next_state[i];
        }
        rewards(j) = t.reward;
        actions[j] = t.action;
    }

    const Eigen::MatrixXd q = net.forward_batch(states);
    const Eigen::VectorXd bootstrap = target.forward_batch(next).colwise().maxCoeff().transpose();
    const Eigen::VectorXd y = rewards + hyper.discount * bootstrap;

    Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(q.rows(), n);
    double loss = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double err = q(Eigen::Index(actions[j]), j) - y(j);
        loss += err * err;
        upstream(Eigen::Index(actions[j]), j) = 2.0 * err / double(n);
    }
    loss /= double(n);

    optimizer.step(net, net.backward_batch(states, upstream));
    return loss;
}

} // namespace capshare::policy
