#pragma once

#include <random>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace capshare::policy {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fully connected inputs -> hidden (ReLU) -> outputs (linear).
class QNetwork {
public:
    struct Gradients {
        Eigen::MatrixXd w1;
        Eigen::VectorXd b1;
        Eigen::MatrixXd w2;
        Eigen::VectorXd b2;
    };

    QNetwork() = default;
    // Zero-initialized.
    QNetwork(int inputs, int hidden, int outputs);

    // He-uniform hidden layer, Glorot-uniform output layer, zero biases.
    static QNetwork random(int inputs, int hidden, int outputs, std::mt19937_64 &rng);

    int inputs() const { return int(w1.cols()); }
    int hidden() const { return int(w1.rows()); }
    int outputs() const { return int(w2.rows()); }

    Eigen::VectorXd forward(std::span<const double> state) const;
    // One sample per column.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd &states) const;

    /// Gradient of sum(upstream .* forward_batch(states)) with respect to
    /// every parameter.
    Gradients backward_batch(const Eigen::MatrixXd &states, const Eigen::MatrixXd &upstream) const;

    void sgd_step(const Gradients &g, double learning_rate);
    bool all_finite() const;

    bool operator==(const QNetwork &o) const {
        return w1 == o.w1 && b1 == o.b1 && w2 == o.w2 && b2 == o.b2;
    }

    Eigen::MatrixXd w1; // hidden x inputs
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2; // outputs x hidden
    Eigen::VectorXd b2;

private:
    void check_input_rows(Eigen::Index rows) const;
};

/// Parameter update rule used by the DQN train step.
class Optimizer {
public:
    virtual ~Optimizer() = default;
    virtual void step(QNetwork &net, const QNetwork::Gradients &g) = 0;
};

class SgdOptimizer final : public Optimizer {
public:
    explicit SgdOptimizer(double learning_rate) : lr_(learning_rate) {}
    void step(QNetwork &net, const QNetwork::Gradients &g) override;

private:
    double lr_;
};

class AdamOptimizer final : public Optimizer {
public:
    explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                           double eps = 1e-8)
        : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}
    void step(QNetwork &net, const QNetwork::Gradients &g) override;

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    QNetwork::Gradients m_, v_;
};

} // namespace capshare::policy
