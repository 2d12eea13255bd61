#pragma once

// Q-learning agent: epsilon-greedy control, experience replay and
// minibatch RMSProp updates of the readout.

#include "lsmrl/envs/environment.hpp"
#include "lsmrl/readout.hpp"
#include "lsmrl/reservoir.hpp"
#include "lsmrl/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace lsmrl {

/// One experience. Activations are stored in single precision.
struct transition {
    std::vector<float> x_t;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<float> x_next;  // empty when terminal
    bool terminal = false;
};

/// Fixed-capacity FIFO of transitions with uniform sampling.
class replay_buffer {
public:
    explicit replay_buffer(std::size_t capacity) : capacity_(capacity)
    {
        if (capacity == 0) throw std::invalid_argument("replay_buffer: capacity must be positive");
    }

    void push(transition t)
    {
        if (items_.size() < capacity_) {
            items_.push_back(std::move(t));
        } else {
            items_[next_] = std::move(t);
        }
        next_ = (next_ + 1) % capacity_;
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }

    /// i-th oldest stored transition.
    const transition& operator[](std::size_t i) const
    {
        if (i >= items_.size()) throw std::out_of_range("replay_buffer: index out of range");
        const std::size_t oldest = items_.size() < capacity_ ? 0 : next_;
        return items_[(oldest + i) % capacity_];
    }

    /// Indices drawn uniformly with replacement.
    std::vector<std::size_t> sample(std::size_t batch, rng_t& rng) const
    {
        if (items_.empty()) throw std::logic_error("replay_buffer: sample from empty buffer");
        std::vector<std::size_t> idx(batch);
        for (auto& i : idx) i = uniform_index(rng, items_.size());
        return idx;
    }

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<transition> items_;
};

struct epsilon_schedule {
    double eps_start = 1.0;
    double eps_final = 1e-3;
    double decay_fraction = 0.1;
    std::uint64_t total_steps = 100000;
};

/// Linear anneal from eps_start to eps_final over the first
/// decay_fraction * total_steps steps, constant afterwards.
inline double eps_at(const epsilon_schedule& s, std::uint64_t step)
{
    const double decay_steps = s.decay_fraction * static_cast<double>(s.total_steps);
    if (!(decay_steps > 0.0) || static_cast<double>(step) >= decay_steps) return s.eps_final;
    const double frac = static_cast<double>(step) / decay_steps;
    return std::max(s.eps_final, s.eps_start + (s.eps_final - s.eps_start) * frac);
}

/// Uniform random action with probability eps, otherwise argmax (lowest
/// index on ties).
inline std::size_t select_action(std::span<const double> q, double eps, rng_t& rng)
{
    if (q.empty()) throw std::invalid_argument("select_action: empty Q vector");
    if (uniform01(rng) < eps) return uniform_index(rng, q.size());
    return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
}

inline double clip_reward(double r)
{
    return std::clamp(r, -1.0, 1.0);
}

struct train_config {
    double gamma = 0.95;
    std::size_t batch = 32;
    std::uint64_t warmup = 100;
    std::size_t replay_capacity = 1000000;
    epsilon_schedule exploration;
    double eval_epsilon = 0.05;
    std::uint64_t eval_steps = 1000;
    std::uint64_t epoch_length = 1000;
    std::uint64_t epochs = 100;
    bool clip_rewards = true;

    std::uint64_t total_steps() const { return epoch_length * epochs; }

    void validate() const
    {
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("train_config: gamma must lie in [0, 1]");
        if (batch == 0) throw std::invalid_argument("train_config: batch must be positive");
        if (epoch_length == 0) throw std::invalid_argument("train_config: epoch_length must be positive");
        if (replay_capacity < batch) throw std::invalid_argument("train_config: replay capacity below batch size");
    }
};

inline Eigen::MatrixXd gather_columns(const replay_buffer& buffer, std::span<const std::size_t> idx, bool next,
                                      Eigen::Index rows)
{
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const auto& t = buffer[idx[b]];
        const auto& src = next ? t.x_next : t.x_t;
        if (src.empty()) continue;
        if (static_cast<Eigen::Index>(src.size()) != rows)
            throw std::invalid_argument("replay: activation size does not match readout");
        for (Eigen::Index r = 0; r < rows; ++r) x(r, static_cast<Eigen::Index>(b)) = src[static_cast<std::size_t>(r)];
    }
    return x;
}

/// Bellman targets r + gamma * max_a Q(x_next, a) with the current
/// readout, or r alone for terminal transitions.
inline std::vector<double> q_target(const replay_buffer& buffer, std::span<const std::size_t> idx,
                                    const readout_params& p, double gamma)
{
    const Eigen::MatrixXd q_next = forward_batch(p, gather_columns(buffer, idx, true, p.inputs()));
    std::vector<double> y(idx.size());
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const auto& t = buffer[idx[b]];
        y[b] = t.reward;
        if (!t.terminal) y[b] += gamma * q_next.col(static_cast<Eigen::Index>(b)).maxCoeff();
    }
    return y;
}

/// Maps the current environment state to readout inputs.
template <typename F>
concept feature_map = requires(F f, environment& env) {
    f.reset();
    { f.features(env) } -> std::same_as<std::vector<double>>;
    { f.size() } -> std::convertible_to<std::size_t>;
};

/// Liquid activations of the current state. The liquid state persists
/// between calls and returns to rest on reset().
class liquid_features {
public:
    liquid_features(const liquid& lsm, double phi_max, rng_t rng)
        : lsm_(&lsm), phi_max_(phi_max), rng_(std::move(rng)), state_(lsm.rest_state())
    {}

    void reset() { state_ = lsm_->rest_state(); }
    std::vector<double> features(environment& env) { return lsm_->window(state_, env.encode(phi_max_), rng_).values; }
    std::size_t size() const { return lsm_->topology.n_exc(); }
    const liquid_state& state() const { return state_; }

private:
    const liquid* lsm_;
    double phi_max_;
    rng_t rng_;
    liquid_state state_;
};

/// Raw observation, bypassing the liquid.
class observation_features {
public:
    explicit observation_features(std::size_t size) : size_(size) {}
    void reset() {}
    std::vector<double> features(environment& env) { return env.observation(); }
    std::size_t size() const { return size_; }

private:
    std::size_t size_;
};

struct eval_result {
    double total_reward = 0.0;
    std::vector<double> gameplay_rewards;  // completed gameplays only
    double partial_reward = 0.0;           // unfinished gameplay at the end
    std::uint64_t steps = 0;

    /// Mean over completed gameplays; the partial one if none completed.
    double mean_gameplay_reward() const
    {
        if (gameplay_rewards.empty()) return partial_reward;
        return std::accumulate(gameplay_rewards.begin(), gameplay_rewards.end(), 0.0) /
               static_cast<double>(gameplay_rewards.size());
    }
};

struct eval_step {
    std::uint64_t step;
    std::size_t gameplay;
    std::vector<double> observation;  // before the action
    std::vector<double> q;
    std::size_t action;
    double reward;
    bool terminal;
};

/// Plays `steps` game steps with the eps-greedy policy and no learning.
/// Rewards are not clipped.
template <feature_map F>
eval_result evaluate(environment& env, F& features, const readout_params& p, std::uint64_t steps, double eps,
                     rng_t& rng, const std::function<void(const eval_step&)>& trace = {})
{
    eval_result out;
    env.reset();
    features.reset();
    auto x = features.features(env);
    double acc = 0.0;
    std::size_t gameplay = 0;
    for (std::uint64_t s = 0; s < steps; ++s) {
        const Eigen::VectorXd q = forward(p, x);
        const std::span<const double> qs(q.data(), static_cast<std::size_t>(q.size()));
        const auto a = select_action(qs, eps, rng);
        std::vector<double> obs;
        if (trace) obs = env.observation();
        const auto r = env.step(a);
        acc += r.reward;
        out.total_reward += r.reward;
        if (trace) trace({s, gameplay, std::move(obs), {qs.begin(), qs.end()}, a, r.reward, r.terminal});
        if (r.terminal) {
            out.gameplay_rewards.push_back(acc);
            acc = 0.0;
            ++gameplay;
            env.reset();
            features.reset();
        }
        x = features.features(env);
    }
    out.partial_reward = acc;
    out.steps = steps;
    return out;
}

struct epoch_metrics {
    std::uint64_t epoch = 0;  // 1-based
    std::uint64_t steps = 0;  // training steps so far
    double train_reward = 0.0;
    std::size_t train_gameplays = 0;
    double eval_reward = 0.0;
    std::size_t eval_gameplays = 0;
    double epsilon = 0.0;
    double loss = 0.0;  // mean minibatch loss over the epoch
    std::uint64_t updates = 0;
};

/// Readout weights, optimizer state and replay memory of one learner.
struct learner {
    readout_params params;
    rmsprop_state optimizer;
    replay_buffer buffer;

    learner(readout_params p, rmsprop_hyper h, std::size_t capacity)
        : params(std::move(p)), optimizer(rmsprop_state::for_params(params, h)), buffer(capacity)
    {}

    /// One minibatch RMSProp step; returns the mean loss.
    double update(std::size_t batch, double gamma, rng_t& rng)
    {
        const auto idx = buffer.sample(batch, rng);
        const auto y = q_target(buffer, idx, params, gamma);
        std::vector<Eigen::Index> actions(idx.size());
        for (std::size_t b = 0; b < idx.size(); ++b) actions[b] = static_cast<Eigen::Index>(buffer[idx[b]].action);
        double loss = 0.0;
        const auto g = batch_gradient(params, gather_columns(buffer, idx, false, params.inputs()), actions, y, &loss);
        rmsprop_update(params, optimizer, g);
        return loss;
    }
};

inline std::vector<float> to_float(const std::vector<double>& v)
{
    return {v.begin(), v.end()};
}

/// Full training run: per game step encode -> features -> eps-greedy ->
/// env step -> store transition -> (after warmup) one minibatch update.
/// After every epoch the policy is evaluated on `eval_env`.
template <feature_map F, feature_map G>
std::vector<epoch_metrics> train(environment& env, F& features, environment& eval_env, G& eval_features,
                                 learner& agent, const train_config& cfg, rng_t& rng, rng_t& eval_rng,
                                 const std::function<void(const epoch_metrics&)>& on_epoch = {})
{
    cfg.validate();
    if (static_cast<Eigen::Index>(features.size()) != agent.params.inputs())
        throw std::invalid_argument("train: feature size does not match readout inputs");
    if (static_cast<Eigen::Index>(env.action_count()) != agent.params.actions())
        throw std::invalid_argument("train: action count does not match readout outputs");

    auto schedule = cfg.exploration;
    schedule.total_steps = cfg.total_steps();

    std::vector<epoch_metrics> history;
    env.reset();
    features.reset();
    auto x = features.features(env);
    double episode_reward = 0.0;
    std::vector<double> epoch_gameplays;
    double loss_sum = 0.0;
    std::uint64_t updates = 0;

    for (std::uint64_t step = 0; step < cfg.total_steps(); ++step) {
        const double eps = eps_at(schedule, step);
        const Eigen::VectorXd q = forward(agent.params, x);
        const auto a = select_action({q.data(), static_cast<std::size_t>(q.size())}, eps, rng);
        const auto r = env.step(a);
        episode_reward += r.reward;

        std::vector<double> x_next;
        if (!r.terminal) x_next = features.features(env);
        agent.buffer.push({to_float(x), a, cfg.clip_rewards ? clip_reward(r.reward) : r.reward, to_float(x_next),
                           r.terminal});

        if (step >= cfg.warmup && agent.buffer.size() >= cfg.batch) {
            loss_sum += agent.update(cfg.batch, cfg.gamma, rng);
            ++updates;
        }

        if (r.terminal) {
            epoch_gameplays.push_back(episode_reward);
            episode_reward = 0.0;
            env.reset();
            features.reset();
            x = features.features(env);
        } else {
            x = std::move(x_next);
        }

        if ((step + 1) % cfg.epoch_length == 0) {
            epoch_metrics m;
            m.epoch = (step + 1) / cfg.epoch_length;
            m.steps = step + 1;
            m.train_gameplays = epoch_gameplays.size();
            m.train_reward = epoch_gameplays.empty()
                                 ? episode_reward
                                 : std::accumulate(epoch_gameplays.begin(), epoch_gameplays.end(), 0.0) /
                                       static_cast<double>(epoch_gameplays.size());
            const auto ev = evaluate(eval_env, eval_features, agent.params, cfg.eval_steps, cfg.eval_epsilon, eval_rng);
            m.eval_reward = ev.mean_gameplay_reward();
            m.eval_gameplays = ev.gameplay_rewards.size();
            m.epsilon = eps_at(schedule, step + 1);
            m.loss = updates ? loss_sum / static_cast<double>(updates) : 0.0;
            m.updates = updates;
            history.push_back(m);
            if (on_epoch) on_epoch(m);
            epoch_gameplays.clear();
            loss_sum = 0.0;
            updates = 0;
        }
    }
    return history;
}

}  // namespace lsmrl
