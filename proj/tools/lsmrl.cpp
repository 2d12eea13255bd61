// lsmrl: train, evaluate and inspect liquid state machine Q-learning agents.

#include "lsmrl/lsmrl.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace lsmrl;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_runtime = 2;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw usage_error("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct config_source {
    std::string preset_name;
    std::string config_file;
    std::vector<std::string> overrides;

    void add(CLI::App* cmd)
    {
        auto* p = cmd->add_option("--preset", preset_name, "Shipped preset name");
        auto* c = cmd->add_option("--config,config", config_file, "INI config file");
        p->excludes(c);
        cmd->add_option("--set", overrides, "Override a config key, e.g. --set train.epochs=10");
    }

    run_config load() const
    {
        run_config c;
        if (!config_file.empty()) {
            c = parse_config(read_file(config_file));
        } else if (!preset_name.empty()) {
            c = preset(preset_name);
        } else {
            throw usage_error("either --preset or a config file is required");
        }
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw usage_error("--set expects key=value, got '" + kv + "'");
            set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
        }
        c.validate();
        return c;
    }
};

std::string csv_join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt::format("{}", v[i]);
    return s;
}

int cmd_train(const config_source& src, std::optional<std::uint64_t> first_seed, std::size_t seeds, std::size_t jobs,
              const std::string& out, bool quiet)
{
    auto c = src.load();
    if (first_seed) c.seed = *first_seed;
    const auto seed = c.seed;
    fs::create_directories(out);
    write_text(fs::path(out) / "config.ini", to_ini(c));
    const auto rows = train_seeds(c, seed, seeds, jobs, out, [&](std::uint64_t s, const epoch_metrics& m) {
        if (!quiet)
            std::cerr << fmt::format("seed {} epoch {} steps {} train {:.3f} eval {:.3f} eps {:.4f} loss {:.5g}\n",
                                     s, m.epoch, m.steps, m.train_reward, m.eval_reward, m.epsilon, m.loss);
    });
    if (!rows.empty())
        std::cout << fmt::format("final eval reward median (last {} epochs): {}\n", std::min<std::size_t>(10, rows.size()),
                                 final_median(rows, 10));
    return exit_ok;
}

int cmd_eval(const std::string& model_path, std::uint64_t steps, double eps, std::uint64_t seed,
             const std::string& trace_path)
{
    const auto m = load_model(model_path);
    auto env = make_env(m.config.env, make_stream(seed, "env-eval")());
    liquid_features features(m.lsm, m.config.phi_max, make_stream(seed, "liquid-eval"));
    auto rng = make_stream(seed, "eval-policy");

    std::ofstream trace;
    if (!trace_path.empty()) {
        trace.open(trace_path, std::ios::binary);
        if (!trace) throw std::runtime_error("cannot write " + trace_path);
        trace << "# schema: lsmrl.trace/1\nstep,gameplay,action,reward,terminal,state_value";
        for (std::size_t a = 0; a < env->action_count(); ++a) trace << ",q" << a;
        const auto obs = env->observation().size();
        for (std::size_t i = 0; i < obs; ++i) trace << ",obs" << i;
        trace << '\n';
    }
    auto on_step = [&](const eval_step& s) {
        double mean = 0.0;
        for (double q : s.q) mean += q;
        mean /= static_cast<double>(s.q.size());
        trace << fmt::format("{},{},{},{},{},{},{},{}\n", s.step, s.gameplay, s.action, s.reward, s.terminal ? 1 : 0,
                             mean, csv_join(s.q), csv_join(s.observation));
    };
    const auto r = evaluate(*env, features, m.readout, steps, eps, rng,
                            trace_path.empty() ? std::function<void(const eval_step&)>{} : on_step);

    nlohmann::json j{{"schema", "lsmrl.eval/1"},
                     {"steps", r.steps},
                     {"epsilon", eps},
                     {"total_reward", r.total_reward},
                     {"completed_gameplays", r.gameplay_rewards.size()},
                     {"gameplay_rewards", r.gameplay_rewards},
                     {"partial_reward", r.partial_reward},
                     {"mean_gameplay_reward", r.mean_gameplay_reward()}};
    std::cout << j.dump(2) << '\n';
    return exit_ok;
}

int cmd_diagnose(const config_source& src, std::uint64_t seed, const std::string& out, double stimulus_ms,
                 double silence_ms, std::size_t trace_neurons)
{
    const auto c = src.load();
    const auto t = build_topology(resolved_topology(c, seed));
    fs::create_directories(out);

    const auto rep = stability(t);
    nlohmann::json eig = nlohmann::json::array();
    for (const auto& l : rep.eigenvalues) eig.push_back({{"re", l.real()}, {"im", l.imag()}});
    write_text(fs::path(out) / "eigenvalues.json",
               nlohmann::json{{"schema", "lsmrl.eigenvalues/1"}, {"eigenvalues", eig}}.dump(1) + "\n");

    auto probe_rng = make_stream(seed, "diagnose-probe");
    const auto rates = random_rates(t.n_input(), c.phi_max, probe_rng);
    const auto fm = fading_memory_probe(t, c.neuron, rates, stimulus_ms, silence_ms, probe_rng);

    std::vector<std::size_t> neurons;
    for (std::size_t i = 0; i < std::min(trace_neurons, t.n_exc()); ++i) neurons.push_back(i);
    auto trace_rng = make_stream(seed, "diagnose-trace");
    const auto traces = membrane_trace(t, c.neuron, rates, neurons, stimulus_ms, trace_rng);
    std::string csv = "# schema: lsmrl.traces/1\nt_ms";
    for (auto i : neurons) csv += fmt::format(",v{}", i);
    csv += '\n';
    const std::size_t steps = traces.empty() ? 0 : traces.front().size();
    for (std::size_t s = 0; s < steps; ++s) {
        csv += fmt::format("{}", static_cast<double>(s + 1) * c.neuron.dt);
        for (const auto& tr : traces) csv += fmt::format(",{}", tr[s]);
        csv += '\n';
    }
    write_text(fs::path(out) / "traces.csv", csv);

    const bool memoryless = fm.response_tail_ms < 50;
    nlohmann::json j{{"schema", "lsmrl.stability/1"},
                     {"neurons", rep.eigenvalues.size()},
                     {"spectral_radius", rep.spectral_radius},
                     {"inside_unit_circle_fraction", rep.inside_unit_circle_fraction},
                     {"outside_count", rep.outside_count},
                     {"tolerance", unit_circle_tolerance},
                     {"verdict", rep.stable ? "stable" : "unstable"},
                     {"fading_memory",
                      {{"stimulus_ms", stimulus_ms},
                       {"silence_ms", silence_ms},
                       {"response_tail_ms", fm.response_tail_ms},
                       {"spikes_during_stimulus", fm.spikes_during_stimulus},
                       {"spikes_during_silence", fm.spikes_during_silence},
                       {"ceased", fm.ceased},
                       {"memoryless", memoryless}}}};
    write_text(fs::path(out) / "stability.json", j.dump(2) + "\n");
    std::cout << fmt::format("verdict {} spectral_radius {:.6f} inside {:.4f} tail {} ms{}\n",
                             rep.stable ? "stable" : "unstable", rep.spectral_radius, rep.inside_unit_circle_fraction,
                             fm.response_tail_ms, memoryless ? " memoryless" : "");
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Liquid state machine Q-learning agents"};
    app.require_subcommand(1);

    config_source train_src;
    std::optional<std::uint64_t> train_seed_v;
    std::size_t seeds = 1, jobs = 1;
    std::string train_out = "runs";
    bool quiet = false;
    auto* train_cmd = app.add_subcommand("train", "Train agents, one per seed");
    train_src.add(train_cmd);
    train_cmd->add_option("--seed", train_seed_v, "First seed (default: train.seed)");
    train_cmd->add_option("--seeds", seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber);
    train_cmd->add_option("--jobs,-j", jobs, "Seeds trained in parallel")->check(CLI::PositiveNumber);
    train_cmd->add_option("--out,-o", train_out, "Output directory");
    train_cmd->add_flag("--quiet,-q", quiet, "No per-epoch progress on stderr");

    std::string model_path, trace_path;
    std::uint64_t eval_steps = 1000, eval_seed = 1;
    double eval_eps = 0.05;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model");
    eval_cmd->add_option("--model,-m", model_path, "Model file")->required();
    eval_cmd->add_option("--steps", eval_steps, "Game steps to play");
    eval_cmd->add_option("--epsilon", eval_eps, "Exploration rate")->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--seed", eval_seed, "Seed for environment and policy");
    eval_cmd->add_option("--out,-o", trace_path, "Per-step trace CSV");

    config_source diag_src;
    std::uint64_t diag_seed = 1;
    std::string diag_out = "diagnose";
    double stimulus_ms = 200, silence_ms = 300;
    std::size_t trace_neurons = 10;
    auto* diag_cmd = app.add_subcommand("diagnose", "Spectrum, fading memory and membrane traces of a liquid");
    diag_src.add(diag_cmd);
    diag_cmd->add_option("--seed", diag_seed, "Topology seed");
    diag_cmd->add_option("--out,-o", diag_out, "Output directory");
    diag_cmd->add_option("--stimulus-ms", stimulus_ms, "Input duration")->check(CLI::NonNegativeNumber);
    diag_cmd->add_option("--silence-ms", silence_ms, "Silent period after the input")->check(CLI::NonNegativeNumber);
    diag_cmd->add_option("--trace-neurons", trace_neurons, "Excitatory neurons to trace");

    std::string preset_name;
    auto* preset_cmd = app.add_subcommand("preset", "Print a shipped preset, or list them");
    preset_cmd->add_option("name", preset_name, "Preset name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*train_cmd) return cmd_train(train_src, train_seed_v, seeds, jobs, train_out, quiet);
        if (*eval_cmd) return cmd_eval(model_path, eval_steps, eval_eps, eval_seed, trace_path);
        if (*diag_cmd) return cmd_diagnose(diag_src, diag_seed, diag_out, stimulus_ms, silence_ms, trace_neurons);
        if (*preset_cmd) {
            if (preset_name.empty()) {
                for (const auto& [name, text] : preset_texts()) std::cout << name << '\n';
            } else {
                std::cout << to_ini(preset(preset_name));
            }
            return exit_ok;
        }
    } catch (const usage_error& e) {
        std::cerr << "lsmrl: " << e.what() << '\n';
        return exit_usage;
    } catch (const config_error& e) {
        std::cerr << "lsmrl: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "lsmrl: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}
