#pragma once

// Initialization-quality probes for a built liquid.

#include "lsmrl/eigen_solver.hpp"
#include "lsmrl/encoding.hpp"
#include "lsmrl/reservoir.hpp"
#include "lsmrl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lsmrl {

struct stability_report {
    std::vector<std::complex<double>> eigenvalues;
    double spectral_radius = 0.0;
    double inside_unit_circle_fraction = 1.0;
    std::size_t outside_count = 0;
    bool stable = true;  // spectral radius <= 1 + tolerance
};

inline constexpr double unit_circle_tolerance = 1e-6;

inline stability_report analyze_spectrum(std::vector<std::complex<double>> eig)
{
    stability_report rep;
    rep.eigenvalues = std::move(eig);
    for (const auto& l : rep.eigenvalues) {
        const double mag = std::abs(l);
        rep.spectral_radius = std::max(rep.spectral_radius, mag);
        if (mag > 1.0 + unit_circle_tolerance) ++rep.outside_count;
    }
    if (!rep.eigenvalues.empty())
        rep.inside_unit_circle_fraction =
            1.0 - static_cast<double>(rep.outside_count) / static_cast<double>(rep.eigenvalues.size());
    rep.stable = rep.spectral_radius <= 1.0 + unit_circle_tolerance;
    return rep;
}

/// Spectrum of the signed recurrent matrix (input weights excluded).
inline stability_report stability(const liquid_topology& t, const eigen_options& opt = {})
{
    return analyze_spectrum(eigen_spectrum(signed_matrix(t), opt));
}

struct fading_memory_result {
    std::size_t response_tail_ms = 0;      // last spike after cutoff, 0 if none
    std::size_t spikes_during_silence = 0;
    std::size_t spikes_during_stimulus = 0;
    bool ceased = true;  // 20 quiet ms reached within the silence window
    bool fading_memory() const { return response_tail_ms > 0; }
};

inline constexpr std::size_t quiet_window_ms = 20;

/// Drives the liquid from rest with `rates` for stimulus_ms, then with no
/// input for silence_ms, and measures how long activity outlasts the input.
inline fading_memory_result fading_memory_probe(const liquid_topology& t, const liquid_params& p,
                                                const rate_vector& rates, double stimulus_ms, double silence_ms,
                                                rng_t& rng)
{
    if (rates.size() != t.n_input()) throw std::invalid_argument("fading_memory_probe: rate vector has wrong length");
    const auto stim_steps = static_cast<std::size_t>(std::lround(stimulus_ms / p.dt));
    const auto silent_steps = static_cast<std::size_t>(std::lround(silence_ms / p.dt));
    auto state = liquid_state::at_rest(t, p);
    std::vector<char> spikes;
    std::vector<double> current;
    auto count = [&state] {
        return static_cast<std::size_t>(std::count(state.spikes_exc.begin(), state.spikes_exc.end(), 1) +
                                        std::count(state.spikes_inh.begin(), state.spikes_inh.end(), 1));
    };

    fading_memory_result out;
    for (std::size_t s = 0; s < stim_steps; ++s) {
        poisson_step(rates, rng, spikes, p.dt);
        step(t, p, state, spikes, current);
        out.spikes_during_stimulus += count();
    }
    const std::vector<char> silence(t.n_input(), 0);
    std::size_t last_spike_step = 0;  // 1-based step of the last spike, 0 if none
    for (std::size_t s = 0; s < silent_steps; ++s) {
        step(t, p, state, silence, current);
        const auto n = count();
        out.spikes_during_silence += n;
        if (n > 0) last_spike_step = s + 1;
    }
    out.response_tail_ms = static_cast<std::size_t>(std::lround(static_cast<double>(last_spike_step) * p.dt));
    out.ceased = static_cast<double>(last_spike_step) * p.dt + static_cast<double>(quiet_window_ms) <= silence_ms;
    return out;
}

/// Random stimulus: each input neuron gets an independent rate uniform in
/// [0, phi_max].
inline rate_vector random_rates(std::size_t n, double phi_max, rng_t& rng)
{
    rate_vector r{std::vector<double>(n), phi_max};
    for (auto& x : r.rates) x = uniform(rng, 0.0, phi_max);
    return r;
}

/// Membrane potential of the selected excitatory neurons after every step,
/// starting from rest; one series of length duration/dt per neuron.
inline std::vector<std::vector<double>> membrane_trace(const liquid_topology& t, const liquid_params& p,
                                                       const rate_vector& rates, std::span<const std::size_t> neurons,
                                                       double duration_ms, rng_t& rng)
{
    for (auto i : neurons)
        if (i >= t.n_exc()) throw std::out_of_range("membrane_trace: neuron index out of range");
    if (rates.size() != t.n_input()) throw std::invalid_argument("membrane_trace: rate vector has wrong length");
    const auto steps = static_cast<std::size_t>(std::lround(duration_ms / p.dt));
    std::vector<std::vector<double>> traces(neurons.size(), std::vector<double>(steps));
    auto state = liquid_state::at_rest(t, p);
    std::vector<char> spikes;
    std::vector<double> current;
    for (std::size_t s = 0; s < steps; ++s) {
        poisson_step(rates, rng, spikes, p.dt);
        step(t, p, state, spikes, current);
        for (std::size_t k = 0; k < neurons.size(); ++k) traces[k][s] = state.v[neurons[k]];
    }
    return traces;
}

}  // namespace lsmrl
