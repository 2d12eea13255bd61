#pragma once

// Run configuration: INI-style sections covering every liquid, neuron,
// readout and Q-learning parameter, plus the shipped presets.

#include "lsmrl/agent.hpp"
#include "lsmrl/readout.hpp"
#include "lsmrl/reservoir.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lsmrl {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct env_config {
    std::string name = "cartpole";  // cartpole | pacman
    std::string layout = "7x7";     // bundled layout name or file path
    int max_steps = 0;              // pacman episode cap, 0 = none
    int scared_steps = 40;
};

struct run_config {
    env_config env;
    topology_config topology;  // n_input is derived from the environment
    liquid_params neuron;
    double t_lsm = 100.0;
    double phi_max = 100.0;
    std::size_t hidden = 32;
    rmsprop_hyper optimizer;
    train_config train;
    std::uint64_t seed = 1;

    void validate() const
    {
        if (env.name != "cartpole" && env.name != "pacman")
            throw config_error("env.name must be 'cartpole' or 'pacman', got '" + env.name + "'");
        neuron.validate();
        train.validate();
        check_phi_max(phi_max);
        if (hidden == 0) throw config_error("readout.hidden must be positive");
        window_steps(t_lsm, neuron);
    }
};

namespace detail {

using ptree = boost::property_tree::ptree;

// One entry per accepted "section.key".
struct config_field {
    std::function<void(run_config&, const std::string&)> set;
    std::function<std::string(const run_config&)> get;
};

template <typename T>
T parse_value(const std::string& text)
{
    std::istringstream in(text);
    T v{};
    if constexpr (std::is_same_v<T, bool>) {
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        throw config_error("invalid boolean '" + text + "'");
    } else if constexpr (std::is_same_v<T, std::string>) {
        return text;
    } else {
        in >> v;
        if (!in || !(in >> std::ws).eof()) throw config_error("invalid value '" + text + "'");
        if constexpr (std::is_unsigned_v<T>)
            if (text.find('-') != std::string::npos) throw config_error("value must be non-negative");
    }
    return v;
}

template <typename T>
std::string show_value(const T& v)
{
    if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
    else if constexpr (std::is_same_v<T, std::string>) return v;
    else return fmt::format("{}", v);
}

template <typename T>
config_field field(T run_config::*outer)
{
    return {[outer](run_config& c, const std::string& s) { c.*outer = parse_value<T>(s); },
            [outer](const run_config& c) { return show_value(c.*outer); }};
}

template <typename S, typename T>
config_field field(S run_config::*outer, T S::*inner)
{
    return {[outer, inner](run_config& c, const std::string& s) { (c.*outer).*inner = parse_value<T>(s); },
            [outer, inner](const run_config& c) { return show_value((c.*outer).*inner); }};
}

template <typename S, typename U, typename T>
config_field field(S run_config::*outer, U S::*mid, T U::*inner)
{
    return {[=](run_config& c, const std::string& s) { ((c.*outer).*mid).*inner = parse_value<T>(s); },
            [=](const run_config& c) { return show_value(((c.*outer).*mid).*inner); }};
}

inline const std::vector<std::pair<std::string, config_field>>& config_fields()
{
    static const std::vector<std::pair<std::string, config_field>> fields{
        {"env.name", field(&run_config::env, &env_config::name)},
        {"env.layout", field(&run_config::env, &env_config::layout)},
        {"env.max_steps", field(&run_config::env, &env_config::max_steps)},
        {"env.scared_steps", field(&run_config::env, &env_config::scared_steps)},
        {"liquid.n_exc", field(&run_config::topology, &topology_config::n_exc)},
        {"liquid.n_inh", field(&run_config::topology, &topology_config::n_inh)},
        {"liquid.k_in", field(&run_config::topology, &topology_config::k_in)},
        {"liquid.c_rec", field(&run_config::topology, &topology_config::c_rec)},
        {"liquid.alpha", field(&run_config::topology, &topology_config::alpha)},
        {"liquid.beta_ee", field(&run_config::topology, &topology_config::beta_ee)},
        {"liquid.beta_ei", field(&run_config::topology, &topology_config::beta_ei)},
        {"liquid.beta_ie", field(&run_config::topology, &topology_config::beta_ie)},
        {"liquid.beta_ii", field(&run_config::topology, &topology_config::beta_ii)},
        {"liquid.t_lsm", field(&run_config::t_lsm)},
        {"liquid.phi_max", field(&run_config::phi_max)},
        {"neuron.v_rest", field(&run_config::neuron, &liquid_params::v_rest)},
        {"neuron.v_reset", field(&run_config::neuron, &liquid_params::v_reset)},
        {"neuron.v_thres", field(&run_config::neuron, &liquid_params::v_thres)},
        {"neuron.tau_mem", field(&run_config::neuron, &liquid_params::tau_mem)},
        {"neuron.t_refrac", field(&run_config::neuron, &liquid_params::t_refrac)},
        {"neuron.dt", field(&run_config::neuron, &liquid_params::dt)},
        {"readout.hidden", field(&run_config::hidden)},
        {"readout.learning_rate", field(&run_config::optimizer, &rmsprop_hyper::learning_rate)},
        {"readout.smoothing", field(&run_config::optimizer, &rmsprop_hyper::smoothing)},
        {"readout.epsilon", field(&run_config::optimizer, &rmsprop_hyper::epsilon)},
        {"readout.weight_decay", field(&run_config::optimizer, &rmsprop_hyper::weight_decay)},
        {"train.gamma", field(&run_config::train, &train_config::gamma)},
        {"train.batch", field(&run_config::train, &train_config::batch)},
        {"train.warmup", field(&run_config::train, &train_config::warmup)},
        {"train.replay_capacity", field(&run_config::train, &train_config::replay_capacity)},
        {"train.eps_start", field(&run_config::train, &train_config::exploration, &epsilon_schedule::eps_start)},
        {"train.eps_final", field(&run_config::train, &train_config::exploration, &epsilon_schedule::eps_final)},
        {"train.decay_fraction",
         field(&run_config::train, &train_config::exploration, &epsilon_schedule::decay_fraction)},
        {"train.eval_epsilon", field(&run_config::train, &train_config::eval_epsilon)},
        {"train.eval_steps", field(&run_config::train, &train_config::eval_steps)},
        {"train.epoch_length", field(&run_config::train, &train_config::epoch_length)},
        {"train.epochs", field(&run_config::train, &train_config::epochs)},
        {"train.clip_rewards", field(&run_config::train, &train_config::clip_rewards)},
        {"train.seed", field(&run_config::seed)},
    };
    return fields;
}

inline const config_field* find_field(const std::string& key)
{
    for (const auto& [name, f] : config_fields())
        if (name == key) return &f;
    return nullptr;
}

}  // namespace detail

/// Sets one "section.key" to a textual value.
inline void set_config_value(run_config& c, const std::string& key, const std::string& value)
{
    const auto* f = detail::find_field(key);
    if (!f) throw config_error("unknown config key '" + key + "'");
    try {
        f->set(c, value);
    } catch (const config_error& e) {
        throw config_error(key + ": " + e.what());
    }
}

/// Applies INI text on top of `base`. Unknown sections or keys are errors.
inline run_config parse_config(std::string_view text, run_config base = {})
{
    detail::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw config_error(fmt::format("config line {}: {}", e.line(), e.message()));
    }
    std::vector<std::string> unknown;
    for (const auto& [section, keys] : tree) {
        if (keys.empty() && !keys.data().empty()) {
            unknown.push_back(section);
            continue;
        }
        for (const auto& [key, value] : keys) {
            const auto full = section + "." + key;
            if (!detail::find_field(full)) {
                unknown.push_back(full);
                continue;
            }
            set_config_value(base, full, value.data());
        }
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw config_error(msg);
    }
    base.validate();
    return base;
}

/// Canonical INI text of a config; parse_config(to_ini(c)) == c.
inline std::string to_ini(const run_config& c)
{
    std::string out;
    std::string section;
    for (const auto& [name, f] : detail::config_fields()) {
        const auto dot = name.find('.');
        const auto sec = name.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) out += "\n";
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += name.substr(dot + 1) + " = " + f.get(c) + "\n";
    }
    return out;
}

/// Shipped presets. Liquid sizes are excitatory + inhibitory at 4:1.
inline const std::map<std::string, std::string_view>& preset_texts()
{
    static const std::map<std::string, std::string_view> presets{
        {"cartpole", R"([env]
name = cartpole

[liquid]
n_exc = 120
n_inh = 30
k_in = 3
c_rec = 3
t_lsm = 100
phi_max = 100

[readout]
hidden = 32

[train]
eps_final = 0.001
eval_epsilon = 0.05
eval_steps = 1000
epoch_length = 1000
epochs = 100
)"},
        {"cartpole-sparse", R"([env]
name = cartpole

[liquid]
n_exc = 120
n_inh = 30
k_in = 3
c_rec = 1.5
t_lsm = 100
phi_max = 100

[readout]
hidden = 32

[train]
eps_final = 0.001
eval_epsilon = 0.05
eval_steps = 1000
epoch_length = 1000
epochs = 100
)"},
        {"pacman-7x7", R"([env]
name = pacman
layout = 7x7
max_steps = 100

[liquid]
n_exc = 400
n_inh = 100
k_in = 4
c_rec = 4
t_lsm = 100
phi_max = 100

[readout]
hidden = 128

[train]
eps_final = 0.1
eval_epsilon = 0
eval_steps = 1000
epoch_length = 5000
epochs = 100
)"},
        {"pacman-7x17", R"([env]
name = pacman
layout = 7x17
max_steps = 200

[liquid]
n_exc = 1600
n_inh = 400
k_in = 4
c_rec = 4
t_lsm = 100
phi_max = 100

[readout]
hidden = 512

[train]
eps_final = 0.1
eval_epsilon = 0
eval_steps = 1000
epoch_length = 5000
epochs = 100
)"},
        {"pacman-17x19", R"([env]
name = pacman
layout = 17x19
max_steps = 400

[liquid]
n_exc = 2400
n_inh = 600
k_in = 4
c_rec = 4
t_lsm = 100
phi_max = 100

[readout]
hidden = 512

[train]
eps_final = 0.1
eval_epsilon = 0
eval_steps = 1000
epoch_length = 30000
epochs = 100
)"},
        {"untuned-weights", R"([env]
name = pacman
layout = 7x7
max_steps = 100

[liquid]
n_exc = 400
n_inh = 100
k_in = 4
c_rec = 4
beta_ee = 0.4
beta_ei = 0.1
beta_ie = 0.1
t_lsm = 100
phi_max = 100

[readout]
hidden = 128

[train]
eps_final = 0.1
eval_epsilon = 0
eval_steps = 1000
epoch_length = 5000
epochs = 100
)"},
    };
    return presets;
}

inline run_config preset(const std::string& name)
{
    const auto& all = preset_texts();
    auto it = all.find(name);
    if (it == all.end()) throw config_error("unknown preset '" + name + "'");
    return parse_config(it->second);
}

}  // namespace lsmrl
