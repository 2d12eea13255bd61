#pragma once

// Builds environments, liquids and learners from a run_config and runs
// single- and multi-seed training.

#include "lsmrl/agent.hpp"
#include "lsmrl/config.hpp"
#include "lsmrl/envs/cartpole.hpp"
#include "lsmrl/envs/pacman.hpp"
#include "lsmrl/metrics.hpp"
#include "lsmrl/model_io.hpp"
#include "lsmrl/reservoir.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace lsmrl {

inline pacman_layout resolve_layout(const std::string& name)
{
    if (bundled_layouts().count(name)) return bundled_layout(name);
    std::ifstream in(name);
    if (!in) throw config_error("env.layout: '" + name + "' is neither a bundled layout nor a readable file");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_layout(ss.str());
}

inline std::unique_ptr<environment> make_env(const env_config& c, std::uint64_t seed)
{
    if (c.name == "cartpole") return std::make_unique<cartpole_env>(seed);
    if (c.name == "pacman") {
        pacman_options o;
        o.max_steps = c.max_steps;
        o.scared_steps = c.scared_steps;
        return std::make_unique<pacman_env>(resolve_layout(c.layout), seed, o);
    }
    throw config_error("unknown environment '" + c.name + "'");
}

/// Topology settings with the input size taken from the environment and
/// the construction seed from `seed`.
inline topology_config resolved_topology(const run_config& c, std::uint64_t seed)
{
    auto t = c.topology;
    t.n_input = make_env(c.env, 0)->encoded_size();
    t.seed = seed;
    return t;
}

inline liquid make_liquid(const run_config& c, std::uint64_t seed)
{
    return {build_topology(resolved_topology(c, seed)), c.neuron, c.t_lsm};
}

struct seed_run {
    std::uint64_t seed = 0;
    std::vector<epoch_metrics> history;
    model trained;
};

/// Trains one seed. All randomness derives from `seed` through named streams.
inline seed_run train_seed(const run_config& c, std::uint64_t seed,
                           const std::function<void(const epoch_metrics&)>& on_epoch = {})
{
    c.validate();
    seed_run out;
    out.seed = seed;
    auto lsm = make_liquid(c, seed);
    auto env = make_env(c.env, make_stream(seed, "env-train")());
    auto eval_env = make_env(c.env, make_stream(seed, "env-eval")());
    liquid_features features(lsm, c.phi_max, make_stream(seed, "liquid-train"));
    liquid_features eval_features(lsm, c.phi_max, make_stream(seed, "liquid-eval"));
    auto init_rng = make_stream(seed, "readout");
    learner agent(init_readout(lsm.topology.n_exc(), c.hidden, env->action_count(), init_rng), c.optimizer,
                  c.train.replay_capacity);
    auto rng = make_stream(seed, "agent");
    auto eval_rng = make_stream(seed, "eval-policy");
    out.history = train(*env, features, *eval_env, eval_features, agent, c.train, rng, eval_rng, on_epoch);

    out.trained.config = c;
    out.trained.config.seed = seed;
    out.trained.seed = seed;
    out.trained.lsm = std::move(lsm);
    out.trained.readout = agent.params;
    out.trained.optimizer = agent.optimizer;
    out.trained.trained_steps = c.train.total_steps();
    return out;
}

/// Trains seeds first..first+count-1 on up to `jobs` threads. Each seed
/// writes <out>/seed-<s>/{metrics.csv,model.json}; the cross-seed summary
/// goes to <out>/summary.csv. Returns the summary rows.
inline std::vector<summary_row> train_seeds(const run_config& c, std::uint64_t first, std::size_t count,
                                            std::size_t jobs, const std::filesystem::path& out,
                                            const std::function<void(std::uint64_t, const epoch_metrics&)>& on_epoch = {})
{
    if (count == 0) throw std::invalid_argument("train_seeds: no seeds requested");
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    std::filesystem::create_directories(out);
    std::vector<std::vector<epoch_metrics>> histories(count);
    std::atomic<std::size_t> next{0};
    std::mutex report;
    std::exception_ptr failure;

    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                const auto seed = first + i;
                auto run = train_seed(c, seed, [&](const epoch_metrics& m) {
                    if (!on_epoch) return;
                    std::lock_guard lock(report);
                    on_epoch(seed, m);
                });
                const auto dir = out / ("seed-" + std::to_string(seed));
                std::filesystem::create_directories(dir);
                write_text(dir / "metrics.csv", metrics_csv(run.history));
                save_model(run.trained, dir / "model.json");
                histories[i] = std::move(run.history);
            } catch (...) {
                std::lock_guard lock(report);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    const auto rows = summarize(histories);
    write_text(out / "summary.csv", summary_csv(rows));
    return rows;
}

}  // namespace lsmrl
