#pragma once

// Rate-based readout: liquid activation -> hidden ReLU -> linear Q head,
// trained by backpropagation with RMSProp.

#include "lsmrl/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lsmrl {

struct readout_params {
    Eigen::MatrixXd w1;  // hidden x inputs
    Eigen::VectorXd b1;  // hidden
    Eigen::MatrixXd w2;  // actions x hidden
    Eigen::VectorXd b2;  // actions

    Eigen::Index inputs() const { return w1.cols(); }
    Eigen::Index hidden() const { return w1.rows(); }
    Eigen::Index actions() const { return w2.rows(); }

    static readout_params zeros(Eigen::Index inputs, Eigen::Index hidden, Eigen::Index actions)
    {
        return {Eigen::MatrixXd::Zero(hidden, inputs), Eigen::VectorXd::Zero(hidden),
                Eigen::MatrixXd::Zero(actions, hidden), Eigen::VectorXd::Zero(actions)};
    }

    bool same_shape(const readout_params& o) const
    {
        return w1.rows() == o.w1.rows() && w1.cols() == o.w1.cols() && b1.size() == o.b1.size() &&
               w2.rows() == o.w2.rows() && w2.cols() == o.w2.cols() && b2.size() == o.b2.size();
    }

    bool all_finite() const
    {
        return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
    }

    bool operator==(const readout_params& o) const
    {
        return same_shape(o) && w1 == o.w1 && b1 == o.b1 && w2 == o.w2 && b2 == o.b2;
    }
};

/// Gradients share the parameter layout.
using readout_grads = readout_params;

struct rmsprop_hyper {
    double learning_rate = 2e-4;
    double smoothing = 0.99;
    double epsilon = 1e-6;
    double weight_decay = 0.0;
};

struct rmsprop_state {
    readout_params sq_avg;
    rmsprop_hyper hyper;

    static rmsprop_state for_params(const readout_params& p, rmsprop_hyper h = {})
    {
        return {readout_params::zeros(p.inputs(), p.hidden(), p.actions()), h};
    }
};

/// Glorot-uniform weights, zero biases.
inline readout_params init_readout(Eigen::Index inputs, Eigen::Index hidden, Eigen::Index actions, rng_t& rng)
{
    if (inputs <= 0 || hidden <= 0 || actions <= 0)
        throw std::invalid_argument("init_readout: all layer sizes must be positive");
    auto p = readout_params::zeros(inputs, hidden, actions);
    auto fill = [&rng](Eigen::MatrixXd& w) {
        const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = uniform(rng, -bound, bound);
    };
    fill(p.w1);
    fill(p.w2);
    return p;
}

struct forward_cache {
    Eigen::VectorXd x;
    Eigen::VectorXd pre;     // w1 x + b1
    Eigen::VectorXd hidden;  // relu(pre)
};

inline Eigen::VectorXd forward(const readout_params& p, std::span<const double> x, forward_cache* cache = nullptr)
{
    if (static_cast<Eigen::Index>(x.size()) != p.inputs())
        throw std::invalid_argument("readout forward: input size does not match w1");
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd pre = p.w1 * xv + p.b1;
    Eigen::VectorXd h = pre.cwiseMax(0.0);
    Eigen::VectorXd q = p.w2 * h + p.b2;
    if (cache) {
        cache->x = xv;
        cache->pre = std::move(pre);
        cache->hidden = std::move(h);
    }
    return q;
}

/// Gradient of 0.5 * (Y - q[action])^2 where td_error = Y - q[action].
inline readout_grads backward(const readout_params& p, const forward_cache& cache, Eigen::Index action,
                              double td_error)
{
    if (action < 0 || action >= p.actions()) throw std::out_of_range("readout backward: invalid action index");
    if (cache.x.size() != p.inputs() || cache.hidden.size() != p.hidden())
        throw std::invalid_argument("readout backward: cache does not match parameters");
    readout_grads g = readout_params::zeros(p.inputs(), p.hidden(), p.actions());
    const double dq = -td_error;
    g.b2(action) = dq;
    g.w2.row(action) = dq * cache.hidden.transpose();
    Eigen::VectorXd dpre = dq * p.w2.row(action).transpose();
    for (Eigen::Index k = 0; k < dpre.size(); ++k)
        if (!(cache.pre(k) > 0.0)) dpre(k) = 0.0;
    g.b1 = dpre;
    g.w1 = dpre * cache.x.transpose();
    return g;
}

/// Q-values for each column of `x` (inputs x batch).
inline Eigen::MatrixXd forward_batch(const readout_params& p, const Eigen::MatrixXd& x)
{
    Eigen::MatrixXd h = ((p.w1 * x).colwise() + p.b1).cwiseMax(0.0);
    return (p.w2 * h).colwise() + p.b2;
}

/// Mean gradient of 0.5 * (Y_b - q_b[a_b])^2 over a minibatch; returns the
/// mean loss through `loss`.
inline readout_grads batch_gradient(const readout_params& p, const Eigen::MatrixXd& x,
                                    std::span<const Eigen::Index> actions, std::span<const double> targets,
                                    double* loss = nullptr)
{
    const Eigen::Index batch = x.cols();
    if (x.rows() != p.inputs()) throw std::invalid_argument("batch_gradient: input size does not match w1");
    if (static_cast<Eigen::Index>(actions.size()) != batch || static_cast<Eigen::Index>(targets.size()) != batch)
        throw std::invalid_argument("batch_gradient: batch sizes disagree");
    Eigen::MatrixXd pre = (p.w1 * x).colwise() + p.b1;
    Eigen::MatrixXd h = pre.cwiseMax(0.0);
    Eigen::MatrixXd q = (p.w2 * h).colwise() + p.b2;

    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(p.actions(), batch);
    double total = 0.0;
    for (Eigen::Index b = 0; b < batch; ++b) {
        const auto a = actions[static_cast<std::size_t>(b)];
        if (a < 0 || a >= p.actions()) throw std::out_of_range("batch_gradient: invalid action index");
        const double td = targets[static_cast<std::size_t>(b)] - q(a, b);
        total += 0.5 * td * td;
        dq(a, b) = -td / static_cast<double>(batch);
    }
    if (loss) *loss = total / static_cast<double>(batch);

    readout_grads g;
    g.w2 = dq * h.transpose();
    g.b2 = dq.rowwise().sum();
    Eigen::MatrixXd dpre = (p.w2.transpose() * dq).cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    g.w1 = dpre * x.transpose();
    g.b1 = dpre.rowwise().sum();
    return g;
}

namespace detail {

template <typename Param>
void rmsprop_apply(Param& param, Param& sq, const Param& grad, const rmsprop_hyper& h)
{
    for (Eigen::Index k = 0; k < param.size(); ++k) {
        double g = grad.data()[k];
        if (h.weight_decay != 0.0) g += h.weight_decay * param.data()[k];
        double& s = sq.data()[k];
        s = h.smoothing * s + (1.0 - h.smoothing) * g * g;
        param.data()[k] -= h.learning_rate * g / (std::sqrt(s) + h.epsilon);
    }
}

}  // namespace detail

/// sq' = rho sq + (1 - rho) g^2;  param' = param - lr g / (sqrt(sq') + eps).
inline void rmsprop_update(readout_params& params, rmsprop_state& opt, const readout_grads& g)
{
    if (!params.same_shape(g) || !params.same_shape(opt.sq_avg))
        throw std::invalid_argument("rmsprop_update: shape mismatch");
    detail::rmsprop_apply(params.w1, opt.sq_avg.w1, g.w1, opt.hyper);
    detail::rmsprop_apply(params.b1, opt.sq_avg.b1, g.b1, opt.hyper);
    detail::rmsprop_apply(params.w2, opt.sq_avg.w2, g.w2, opt.hyper);
    detail::rmsprop_apply(params.b2, opt.sq_avg.b2, g.b2, opt.hyper);
}

}  // namespace lsmrl
