#pragma once

// Sparse random LIF liquid: construction and simulation.

#include "lsmrl/encoding.hpp"
#include "lsmrl/rng.hpp"
#include "lsmrl/sparse.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsmrl {

/// LIF neuron parameters shared by excitatory and inhibitory populations.
/// Potentials are dimensionless, times in ms.
struct liquid_params {
    double v_rest = 0.0;
    double v_reset = 0.0;
    double v_thres = 0.5;
    double tau_mem = 20.0;
    double t_refrac = 1.0;
    double dt = 1.0;

    void validate() const
    {
        if (!(v_reset < v_thres)) throw std::invalid_argument("liquid_params: v_reset must be below v_thres");
        if (!(tau_mem > 0.0)) throw std::invalid_argument("liquid_params: tau_mem must be positive");
        if (!(dt > 0.0)) throw std::invalid_argument("liquid_params: dt must be positive");
        if (!(t_refrac >= 0.0)) throw std::invalid_argument("liquid_params: t_refrac must be non-negative");
    }

    int refrac_steps() const { return static_cast<int>(std::lround(t_refrac / dt)); }
};

/// Construction hyperparameters of the liquid.
struct topology_config {
    std::size_t n_input = 0;
    std::size_t n_exc = 0;
    std::size_t n_inh = 0;
    double k_in = 3.0;   // mean input fan-in per excitatory neuron
    double c_rec = 4.0;  // mean cross-population fan-in
    double alpha = 0.6;
    double beta_ee = 0.05;
    double beta_ei = 0.25;
    double beta_ie = 0.3;
    double beta_ii = 0.01;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (n_exc == 0) throw std::invalid_argument("topology_config: n_exc must be positive");
        if (n_inh == 0 && c_rec > 0.0)
            throw std::invalid_argument("topology_config: c_rec > 0 needs inhibitory neurons");
        for (double b : {alpha, beta_ee, beta_ei, beta_ie, beta_ii})
            if (!(b > 0.0)) throw std::invalid_argument("topology_config: weight bounds must be positive");
        if (k_in < 0.0 || c_rec < 0.0) throw std::invalid_argument("topology_config: fan-ins must be non-negative");
        if (n_input > 0 && k_in > static_cast<double>(n_input))
            throw std::invalid_argument("topology_config: k_in exceeds n_input (probability > 1)");
        if (n_inh > 0 && c_rec > static_cast<double>(std::min(n_exc, n_inh)))
            throw std::invalid_argument("topology_config: c_rec exceeds min(n_exc, n_inh) (probability > 1)");
    }
};

struct liquid_topology {
    sparse_matrix w_pe;  // n_input x n_exc
    sparse_matrix w_ee;  // n_exc x n_exc
    sparse_matrix w_ei;  // n_exc x n_inh
    sparse_matrix w_ie;  // n_inh x n_exc
    sparse_matrix w_ii;  // n_inh x n_inh
    topology_config config;

    std::size_t n_input() const { return config.n_input; }
    std::size_t n_exc() const { return config.n_exc; }
    std::size_t n_inh() const { return config.n_inh; }
    std::size_t n_neurons() const { return config.n_exc + config.n_inh; }

    bool operator==(const liquid_topology& o) const
    {
        return w_pe == o.w_pe && w_ee == o.w_ee && w_ei == o.w_ei && w_ie == o.w_ie && w_ii == o.w_ii;
    }
};

namespace detail {

// Bernoulli(p) mask with uniform(0, bound) weights, drawn row-major.
inline sparse_matrix random_block(std::size_t rows, std::size_t cols, double p, double bound, rng_t& rng)
{
    std::vector<sparse_matrix::entry> entries;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (uniform01(rng) < p)
                entries.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c), 0.0});
    for (auto& e : entries) {
        // uniform(0, bound) excluding an exact zero so the synapse stays in the support
        do {
            e.value = bound * uniform01(rng);
        } while (e.value == 0.0);
    }
    return sparse_matrix::from_triplets(rows, cols, std::move(entries));
}

// Boolean support of a * b (dense, row-major).
inline std::vector<char> product_support(const sparse_matrix& a, const sparse_matrix& b)
{
    std::vector<char> support(a.rows() * b.cols(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (auto k : a.row_cols(i))
            for (auto j : b.row_cols(k)) support[i * b.cols() + j] = 1;
    return support;
}

// Candidate Bernoulli(p) block restricted to `mask`, with uniform(0, bound) weights.
inline sparse_matrix masked_block(std::size_t n, double p, double bound, const std::vector<char>& mask,
                                  bool zero_diagonal, rng_t& rng)
{
    std::vector<sparse_matrix::entry> entries;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const bool candidate = uniform01(rng) < p;
            if (candidate && mask[r * n + c] && !(zero_diagonal && r == c))
                entries.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c), 0.0});
        }
    for (auto& e : entries) {
        do {
            e.value = bound * uniform01(rng);
        } while (e.value == 0.0);
    }
    return sparse_matrix::from_triplets(n, n, std::move(entries));
}

}  // namespace detail

/// Builds the fixed liquid. Each input/excitatory pair connects with
/// probability k_in/n_input; E->I with c_rec/n_exc and I->E with c_rec/n_inh.
/// E->E candidates (rate c_rec/n_exc) survive only where W_EI*W_IE is
/// nonzero and off the diagonal; I->I candidates (rate c_rec/n_inh) only
/// where W_IE*W_EI is nonzero.
inline liquid_topology build_topology(const topology_config& config, rng_t& rng)
{
    config.validate();
    if (config.n_exc != 4 * config.n_inh)
        std::clog << "lsmrl: warning: n_exc (" << config.n_exc << ") is not 4 x n_inh (" << config.n_inh << ")\n";

    const auto ne = config.n_exc;
    const auto ni = config.n_inh;
    const double p_in = config.n_input ? config.k_in / static_cast<double>(config.n_input) : 0.0;
    const double p_ei = config.c_rec / static_cast<double>(ne);
    const double p_ie = ni ? config.c_rec / static_cast<double>(ni) : 0.0;

    liquid_topology t;
    t.config = config;
    t.w_pe = detail::random_block(config.n_input, ne, p_in, config.alpha, rng);
    t.w_ei = detail::random_block(ne, ni, p_ei, config.beta_ei, rng);
    t.w_ie = detail::random_block(ni, ne, p_ie, config.beta_ie, rng);
    t.w_ee = detail::masked_block(ne, p_ei, config.beta_ee, detail::product_support(t.w_ei, t.w_ie), true, rng);
    t.w_ii = detail::masked_block(ni, p_ie, config.beta_ii, detail::product_support(t.w_ie, t.w_ei), false, rng);
    return t;
}

inline liquid_topology build_topology(const topology_config& config)
{
    auto rng = make_stream(config.seed, "topology");
    return build_topology(config, rng);
}

/// Membrane and spike state of the liquid. Neurons are indexed excitatory
/// first, then inhibitory.
struct liquid_state {
    std::vector<double> v;
    std::vector<int> refrac_remaining;
    std::vector<char> spikes_exc;  // emitted at the last step
    std::vector<char> spikes_inh;
    std::vector<std::uint32_t> exc_spike_counts;

    static liquid_state at_rest(const liquid_topology& t, const liquid_params& p)
    {
        liquid_state s;
        s.v.assign(t.n_neurons(), p.v_rest);
        s.refrac_remaining.assign(t.n_neurons(), 0);
        s.spikes_exc.assign(t.n_exc(), 0);
        s.spikes_inh.assign(t.n_inh(), 0);
        s.exc_spike_counts.assign(t.n_exc(), 0);
        return s;
    }

    bool operator==(const liquid_state&) const = default;
};

/// Normalized excitatory spike counts of one window, each in [0, 1].
struct activation {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    bool operator==(const activation&) const = default;
};

/// Advances the liquid by one forward-Euler step.
///
/// Input spikes act in the same step; recurrent spikes stored in `state`
/// (emitted by the previous step) act now, inhibitory ones with negative
/// sign. Refractory neurons keep their potential and discard input.
/// `current` is caller-provided scratch of size n_neurons.
inline void step(const liquid_topology& t, const liquid_params& p, liquid_state& state,
                 std::span<const char> input_spikes, std::vector<double>& current)
{
    const auto ne = t.n_exc();
    const auto ni = t.n_inh();
    const auto n = ne + ni;
    if (input_spikes.size() != t.n_input())
        throw std::invalid_argument("step: input spike vector has wrong length");
    if (state.v.size() != n || state.refrac_remaining.size() != n || state.spikes_exc.size() != ne ||
        state.spikes_inh.size() != ni || state.exc_spike_counts.size() != ne)
        throw std::invalid_argument("step: liquid state does not match topology");

    current.assign(n, 0.0);
    double* cur_exc = current.data();
    double* cur_inh = current.data() + ne;

    for (std::size_t l = 0; l < input_spikes.size(); ++l) {
        if (!input_spikes[l]) continue;
        auto cs = t.w_pe.row_cols(l);
        auto ws = t.w_pe.row_values(l);
        for (std::size_t k = 0; k < cs.size(); ++k) cur_exc[cs[k]] += ws[k];
    }
    for (std::size_t j = 0; j < ne; ++j) {
        if (!state.spikes_exc[j]) continue;
        auto cs = t.w_ee.row_cols(j);
        auto ws = t.w_ee.row_values(j);
        for (std::size_t k = 0; k < cs.size(); ++k) cur_exc[cs[k]] += ws[k];
        cs = t.w_ei.row_cols(j);
        ws = t.w_ei.row_values(j);
        for (std::size_t k = 0; k < cs.size(); ++k) cur_inh[cs[k]] += ws[k];
    }
    for (std::size_t j = 0; j < ni; ++j) {
        if (!state.spikes_inh[j]) continue;
        auto cs = t.w_ie.row_cols(j);
        auto ws = t.w_ie.row_values(j);
        for (std::size_t k = 0; k < cs.size(); ++k) cur_exc[cs[k]] -= ws[k];
        cs = t.w_ii.row_cols(j);
        ws = t.w_ii.row_values(j);
        for (std::size_t k = 0; k < cs.size(); ++k) cur_inh[cs[k]] -= ws[k];
    }

    const double leak = p.dt / p.tau_mem;
    const int refrac = p.refrac_steps();
    for (std::size_t i = 0; i < n; ++i) {
        char fired = 0;
        if (state.refrac_remaining[i] > 0) {
            --state.refrac_remaining[i];
        } else {
            double v = state.v[i] + leak * (p.v_rest - state.v[i]) + current[i];
            if (v >= p.v_thres) {
                fired = 1;
                v = p.v_reset;
                state.refrac_remaining[i] = refrac;
            }
            state.v[i] = v;
        }
        if (i < ne) {
            state.spikes_exc[i] = fired;
            state.exc_spike_counts[i] += static_cast<std::uint32_t>(fired);
        } else {
            state.spikes_inh[i - ne] = fired;
        }
    }
}

inline void step(const liquid_topology& t, const liquid_params& p, liquid_state& state,
                 std::span<const char> input_spikes)
{
    std::vector<double> current;
    step(t, p, state, input_spikes, current);
}

/// Number of simulation steps in a window of t_lsm ms.
inline std::size_t window_steps(double t_lsm, const liquid_params& p)
{
    const double steps = t_lsm / p.dt;
    const double rounded = std::round(steps);
    if (!(t_lsm > 0.0) || std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
        throw std::invalid_argument("run_window: t_lsm must be a positive multiple of dt");
    return static_cast<std::size_t>(rounded);
}

/// Simulates one LSM window under fresh Poisson input drawn from `rates`,
/// carrying potentials and refractory state in from `state`. Spike counts
/// are zeroed first; returns counts normalized by the step count.
inline activation run_window(const liquid_topology& t, const liquid_params& p, liquid_state& state,
                             const rate_vector& rates, double t_lsm, rng_t& rng)
{
    if (rates.size() != t.n_input()) throw std::invalid_argument("run_window: rate vector has wrong length");
    const auto steps = window_steps(t_lsm, p);
    std::fill(state.exc_spike_counts.begin(), state.exc_spike_counts.end(), 0u);
    std::vector<char> spikes;
    std::vector<double> current;
    for (std::size_t s = 0; s < steps; ++s) {
        poisson_step(rates, rng, spikes, p.dt);
        step(t, p, state, spikes, current);
    }
    activation a;
    a.values.resize(t.n_exc());
    const double norm = static_cast<double>(steps);
    for (std::size_t i = 0; i < t.n_exc(); ++i) a.values[i] = state.exc_spike_counts[i] / norm;
    return a;
}

/// Dense signed recurrent matrix; entry (i, j) is the weight of synapse
/// j -> i, negative when j is inhibitory.
inline Eigen::MatrixXd signed_matrix(const liquid_topology& t)
{
    const auto ne = t.n_exc();
    const auto n = t.n_neurons();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    auto scatter = [&](const sparse_matrix& w, std::size_t pre_off, std::size_t post_off, double sign) {
        for (const auto& e : w.triplets())
            m(static_cast<Eigen::Index>(post_off + e.col), static_cast<Eigen::Index>(pre_off + e.row)) =
                sign * e.value;
    };
    scatter(t.w_ee, 0, 0, 1.0);
    scatter(t.w_ei, 0, ne, 1.0);
    scatter(t.w_ie, ne, 0, -1.0);
    scatter(t.w_ii, ne, ne, -1.0);
    return m;
}

/// A built liquid with its neuron model and window length.
struct liquid {
    liquid_topology topology;
    liquid_params params;
    double t_lsm = 100.0;

    liquid_state rest_state() const { return liquid_state::at_rest(topology, params); }

    activation window(liquid_state& state, const rate_vector& rates, rng_t& rng) const
    {
        return run_window(topology, params, state, rates, t_lsm, rng);
    }
};

}  // namespace lsmrl
