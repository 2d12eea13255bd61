#pragma once

// Classic cart-pole balancing task with a 200-step horizon.

#include "lsmrl/encoding.hpp"
#include "lsmrl/envs/environment.hpp"
#include "lsmrl/rng.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace lsmrl {

struct cartpole_state {
    double chi = 0.0;      // cart position, m
    double chi_dot = 0.0;  // cart velocity, m/s
    double phi = 0.0;      // pole angle, rad
    double phi_dot = 0.0;  // pole angular velocity, rad/s

    bool operator==(const cartpole_state&) const = default;
};

struct cartpole_physics {
    double gravity = 9.8;
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double half_length = 0.5;
    double force = 10.0;
    double tau = 0.02;
    double chi_limit = 2.4;
    double phi_limit = 12.0 * std::numbers::pi / 180.0;
    int horizon = 200;
};

enum class cartpole_action : std::size_t { left = 0, right = 1 };

/// One Euler step of the cart-pole equations of motion.
inline cartpole_state cartpole_dynamics(const cartpole_state& s, cartpole_action action,
                                        const cartpole_physics& k = {})
{
    const double f = action == cartpole_action::right ? k.force : -k.force;
    const double total = k.cart_mass + k.pole_mass;
    const double pml = k.pole_mass * k.half_length;
    const double cos_phi = std::cos(s.phi);
    const double sin_phi = std::sin(s.phi);
    const double temp = (f + pml * s.phi_dot * s.phi_dot * sin_phi) / total;
    const double phi_acc = (k.gravity * sin_phi - cos_phi * temp) /
                           (k.half_length * (4.0 / 3.0 - k.pole_mass * cos_phi * cos_phi / total));
    const double chi_acc = temp - pml * phi_acc * cos_phi / total;
    return {s.chi + k.tau * s.chi_dot, s.chi_dot + k.tau * chi_acc, s.phi + k.tau * s.phi_dot,
            s.phi_dot + k.tau * phi_acc};
}

inline bool cartpole_out_of_bounds(const cartpole_state& s, const cartpole_physics& k = {})
{
    return std::abs(s.chi) > k.chi_limit || std::abs(s.phi) > k.phi_limit;
}

class cartpole_env final : public environment {
public:
    /// Encoder clipping ranges for (chi, chi_dot, phi, phi_dot).
    static constexpr std::array<value_range, 4> encoding_ranges{
        {{-2.5, 2.5}, {-0.5, 0.5}, {-0.28, 0.28}, {-0.88, 0.88}}};
    static constexpr std::size_t levels = 10;

    explicit cartpole_env(std::uint64_t seed, cartpole_physics physics = {})
        : rng_(make_stream(seed, "cartpole")), physics_(physics)
    {
        reset();
    }

    std::string name() const override { return "cartpole"; }
    std::size_t action_count() const override { return 2; }

    void reset() override
    {
        state_ = {uniform(rng_, -0.05, 0.05), uniform(rng_, -0.05, 0.05), uniform(rng_, -0.05, 0.05),
                  uniform(rng_, -0.05, 0.05)};
        steps_ = 0;
        done_ = false;
    }

    step_result step(std::size_t action) override
    {
        if (done_) throw episode_finished("cartpole: step after terminal; call reset()");
        if (action >= 2) throw std::out_of_range("cartpole: invalid action");
        state_ = cartpole_dynamics(state_, static_cast<cartpole_action>(action), physics_);
        ++steps_;
        done_ = cartpole_out_of_bounds(state_, physics_) || steps_ >= physics_.horizon;
        return {1.0, done_};
    }

    bool terminal() const override { return done_; }

    std::vector<double> observation() const override
    {
        return {state_.chi, state_.chi_dot, state_.phi, state_.phi_dot};
    }

    rate_vector encode(double phi_max) const override
    {
        const auto obs = observation();
        return encode_levels(obs, encoding_ranges, levels, phi_max);
    }

    std::size_t encoded_size() const override { return encoding_ranges.size() * levels; }

    const cartpole_state& state() const { return state_; }
    /// Overrides the current state, e.g. to probe a specific configuration.
    void set_state(const cartpole_state& s)
    {
        state_ = s;
        done_ = cartpole_out_of_bounds(s, physics_);
    }
    int steps() const { return steps_; }

private:
    rng_t rng_;
    cartpole_physics physics_;
    cartpole_state state_;
    int steps_ = 0;
    bool done_ = false;
};

}  // namespace lsmrl
