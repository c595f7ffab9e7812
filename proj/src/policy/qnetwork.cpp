#include "capshare/policy/qnetwork.hpp"

#include <cmath>
#include <string>

namespace capshare::policy {

QNetwork::QNetwork(int inputs, int hidden, int outputs) {
    if (inputs <= 0 || hidden <= 0 || outputs <= 0)
        throw ShapeError("QNetwork layer sizes must be positive");
    w1 = Eigen::MatrixXd::Zero(hidden, inputs);
    b1 = Eigen::VectorXd::Zero(hidden);
    w2 = Eigen::MatrixXd::Zero(outputs, hidden);
    b2 = Eigen::VectorXd::Zero(outputs);
}

QNetwork QNetwork::random(int inputs, int hidden, int outputs, std::mt19937_64 &rng) {
    QNetwork net(inputs, hidden, outputs);
    const double l1 = std::sqrt(6.0 / inputs);
    const double l2 = std::sqrt(6.0 / (hidden + outputs));
    std::uniform_real_distribution<double> u1(-l1, l1), u2(-l2, l2);
    // Fill row-major so the draw order matches the persisted layout.
    for (int r = 0; r < hidden; ++r)
        for (int c = 0; c < inputs; ++c) net.w1(r, c) = u1(rng);
    for (int r = 0; r < outputs; ++r)
        for (int c = 0; c < hidden; ++c) net.w2(r, c) = u2(rng);
    return net;
}

void QNetwork::check_input_rows(Eigen::Index rows) const {
    if (rows != w1.cols())
        throw ShapeError("QNetwork expects " + std::to_string(w1.cols()) + " inputs, got " +
                         std::to_string(rows));
    if (w2.cols() != w1.rows() || b1.size() != w1.rows() || b2.size() != w2.rows())
        throw ShapeError("QNetwork layer shapes are inconsistent");
}

Eigen::VectorXd QNetwork::forward(std::span<const double> state) const {
    check_input_rows(Eigen::Index(state.size()));
    const Eigen::Map<const Eigen::VectorXd> s(state.data(), Eigen::Index(state.size()));
    const Eigen::VectorXd h = (w1 * s + b1).cwiseMax(0.0);
    return w2 * h + b2;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd &states) const {
    check_input_rows(states.rows());
    const Eigen::MatrixXd h = ((w1 * states).colwise() + b1).cwiseMax(0.0);
    return (w2 * h).colwise() + b2;
}

QNetwork::Gradients QNetwork::backward_batch(const Eigen::MatrixXd &states,
                                             const Eigen::MatrixXd &upstream) const {
    check_input_rows(states.rows());
    if (upstream.rows() != w2.rows() || upstream.cols() != states.cols())
        throw ShapeError("QNetwork upstream gradient has the wrong shape");

    const Eigen::MatrixXd pre = (w1 * states).colwise() + b1;
    const Eigen::MatrixXd h = pre.cwiseMax(0.0);
    Gradients g;
    g.w2 = upstream * h.transpose();
    g.b2 = upstream.rowwise().sum();
    const Eigen::MatrixXd dh = w2.transpose() * upstream;
    const Eigen::MatrixXd dpre = dh.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    g.w1 = dpre * states.transpose();
    g.b1 = dpre.rowwise().sum();
    return g;
}

void QNetwork::sgd_step(const Gradients &g, double learning_rate) {
    w1 -= learning_rate * g.w1;
    b1 -= learning_rate * g.b1;
    w2 -= learning_rate * g.w2;
    b2 -= learning_rate * g.b2;
}

bool QNetwork::all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

void SgdOptimizer::step(QNetwork &net, const QNetwork::Gradients &g) { net.sgd_step(g, lr_); }

namespace {

template <class M> void adam_update(M &param, const M &grad, M &m, M &v, double lr, double b1,
                                    double b2, double eps, double c1, double c2) {
    if (m.size() != grad.size()) {
        m = M::Zero(grad.rows(), grad.cols());
        v = M::Zero(grad.rows(), grad.cols());
    }
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

} // namespace

void AdamOptimizer::step(QNetwork &net, const QNetwork::Gradients &g) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, double(t_));
    const double c2 = 1.0 - std::pow(beta2_, double(t_));
    adam_update(net.w1, g.w1, m_.w1, v_.w1, lr_, beta1_, beta2_, eps_, c1, c2);
    adam_update(net.b1, g.b1, m_.b1, v_.b1, lr_, beta1_, beta2_, eps_, c1, c2);
    adam_update(net.w2, g.w2, m_.w2, v_.w2, lr_, beta1_, beta2_, eps_, c1, c2);
    adam_update(net.b2, g.b2, m_.b2, v_.b2, lr_, beta1_, beta2_, eps_, c1, c2);
}

} // namespace capshare::policy
