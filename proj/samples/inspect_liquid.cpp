// Builds a liquid and reports its spectrum and response to a random input.

#include "lsmrl/lsmrl.hpp"

#include <fmt/format.h>

int main()
{
    lsmrl::topology_config c;
    c.n_input = 40;
    c.n_exc = 400;
    c.n_inh = 100;
    c.k_in = 4;
    c.c_rec = 4;
    c.seed = 7;
    const auto topology = lsmrl::build_topology(c);

    const auto rep = lsmrl::stability(topology);
    fmt::print("spectral radius {:.4f}, {} of {} eigenvalues outside the unit circle\n", rep.spectral_radius,
               rep.outside_count, rep.eigenvalues.size());

    auto rng = lsmrl::make_stream(c.seed, "probe");
    const auto rates = lsmrl::random_rates(c.n_input, 100.0, rng);
    const auto fm = lsmrl::fading_memory_probe(topology, {}, rates, 200, 200, rng);
    fmt::print("{} spikes during input, activity lasts {} ms after it stops\n", fm.spikes_during_stimulus,
               fm.response_tail_ms);
}
