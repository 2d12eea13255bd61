#pragma once

#include "lsmrl/encoding.hpp"

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsmrl {

struct step_result {
    double reward = 0.0;
    bool terminal = false;
};

/// Thrown when an environment is stepped after a terminal transition.
struct episode_finished : std::logic_error {
    using std::logic_error::logic_error;
};

/// Episodic environment. Each instance owns its random stream.
class environment {
public:
    virtual ~environment() = default;

    virtual std::string name() const = 0;
    virtual std::size_t action_count() const = 0;
    virtual void reset() = 0;
    virtual step_result step(std::size_t action) = 0;
    virtual bool terminal() const = 0;

    /// Raw observation of the current state.
    virtual std::vector<double> observation() const = 0;
    /// Input-neuron firing rates for the current state.
    virtual rate_vector encode(double phi_max) const = 0;
    /// Length of the vector returned by encode().
    virtual std::size_t encoded_size() const = 0;
};

}  // namespace lsmrl
