#pragma once

// Versioned model container: run configuration, the full liquid matrices,
// readout weights and RMSProp state.

#include "lsmrl/config.hpp"
#include "lsmrl/readout.hpp"
#include "lsmrl/reservoir.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace lsmrl {

inline constexpr const char* model_format = "lsmrl-model";
inline constexpr int model_version = 1;

struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct model {
    run_config config;
    std::uint64_t seed = 0;
    liquid lsm;
    readout_params readout;
    rmsprop_state optimizer;
    std::uint64_t trained_steps = 0;
};

namespace detail {

using json = nlohmann::json;

inline json sparse_to_json(const sparse_matrix& m)
{
    json rows = json::array(), cols = json::array(), vals = json::array();
    for (const auto& e : m.triplets()) {
        rows.push_back(e.row);
        cols.push_back(e.col);
        vals.push_back(e.value);
    }
    return {{"shape", {m.rows(), m.cols()}}, {"row", rows}, {"col", cols}, {"value", vals}};
}

inline sparse_matrix sparse_from_json(const json& j)
{
    const auto rows = j.at("shape").at(0).get<std::size_t>();
    const auto cols = j.at("shape").at(1).get<std::size_t>();
    const auto& r = j.at("row");
    const auto& c = j.at("col");
    const auto& v = j.at("value");
    if (r.size() != c.size() || r.size() != v.size()) throw model_error("sparse matrix arrays differ in length");
    std::vector<sparse_matrix::entry> entries;
    entries.reserve(r.size());
    for (std::size_t k = 0; k < r.size(); ++k)
        entries.push_back({r[k].get<std::uint32_t>(), c[k].get<std::uint32_t>(), v[k].get<double>()});
    return sparse_matrix::from_triplets(rows, cols, std::move(entries));
}

inline json dense_to_json(const Eigen::MatrixXd& m)
{
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return {{"shape", {m.rows(), m.cols()}}, {"data", data}};
}

inline Eigen::MatrixXd dense_from_json(const json& j)
{
    const auto rows = j.at("shape").at(0).get<Eigen::Index>();
    const auto cols = j.at("shape").at(1).get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw model_error("dense matrix has wrong size");
    Eigen::MatrixXd m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
    return m;
}

inline json params_to_json(const readout_params& p)
{
    return {{"w1", dense_to_json(p.w1)}, {"b1", dense_to_json(p.b1)}, {"w2", dense_to_json(p.w2)},
            {"b2", dense_to_json(p.b2)}};
}

inline readout_params params_from_json(const json& j)
{
    readout_params p;
    p.w1 = dense_from_json(j.at("w1"));
    p.b1 = dense_from_json(j.at("b1"));
    p.w2 = dense_from_json(j.at("w2"));
    p.b2 = dense_from_json(j.at("b2"));
    if (p.b1.size() != p.w1.rows() || p.w2.cols() != p.w1.rows() || p.b2.size() != p.w2.rows())
        throw model_error("readout parameter shapes are inconsistent");
    return p;
}

}  // namespace detail

inline nlohmann::json model_to_json(const model& m)
{
    using detail::json;
    const auto& t = m.lsm.topology;
    json j;
    j["format"] = model_format;
    j["version"] = model_version;
    j["seed"] = m.seed;
    j["trained_steps"] = m.trained_steps;
    j["config"] = to_ini(m.config);
    j["liquid"] = {{"n_input", t.config.n_input},
                   {"n_exc", t.config.n_exc},
                   {"n_inh", t.config.n_inh},
                   {"k_in", t.config.k_in},
                   {"c_rec", t.config.c_rec},
                   {"alpha", t.config.alpha},
                   {"beta_ee", t.config.beta_ee},
                   {"beta_ei", t.config.beta_ei},
                   {"beta_ie", t.config.beta_ie},
                   {"beta_ii", t.config.beta_ii},
                   {"topology_seed", t.config.seed},
                   {"t_lsm", m.lsm.t_lsm},
                   {"w_pe", detail::sparse_to_json(t.w_pe)},
                   {"w_ee", detail::sparse_to_json(t.w_ee)},
                   {"w_ei", detail::sparse_to_json(t.w_ei)},
                   {"w_ie", detail::sparse_to_json(t.w_ie)},
                   {"w_ii", detail::sparse_to_json(t.w_ii)}};
    j["readout"] = detail::params_to_json(m.readout);
    const auto& h = m.optimizer.hyper;
    j["optimizer"] = {{"learning_rate", h.learning_rate},
                      {"smoothing", h.smoothing},
                      {"epsilon", h.epsilon},
                      {"weight_decay", h.weight_decay},
                      {"sq_avg", detail::params_to_json(m.optimizer.sq_avg)}};
    return j;
}

inline model model_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || j.value("format", "") != model_format) throw model_error("not an lsmrl model container");
    const int version = j.at("version").get<int>();
    if (version != model_version)
        throw model_error("model container version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(model_version) + ")");
    try {
        model m;
        m.seed = j.at("seed").get<std::uint64_t>();
        m.trained_steps = j.at("trained_steps").get<std::uint64_t>();
        m.config = parse_config(j.at("config").get<std::string>());
        const auto& l = j.at("liquid");
        auto& tc = m.lsm.topology.config;
        tc.n_input = l.at("n_input").get<std::size_t>();
        tc.n_exc = l.at("n_exc").get<std::size_t>();
        tc.n_inh = l.at("n_inh").get<std::size_t>();
        tc.k_in = l.at("k_in").get<double>();
        tc.c_rec = l.at("c_rec").get<double>();
        tc.alpha = l.at("alpha").get<double>();
        tc.beta_ee = l.at("beta_ee").get<double>();
        tc.beta_ei = l.at("beta_ei").get<double>();
        tc.beta_ie = l.at("beta_ie").get<double>();
        tc.beta_ii = l.at("beta_ii").get<double>();
        tc.seed = l.at("topology_seed").get<std::uint64_t>();
        m.lsm.t_lsm = l.at("t_lsm").get<double>();
        m.lsm.params = m.config.neuron;
        auto& t = m.lsm.topology;
        t.w_pe = detail::sparse_from_json(l.at("w_pe"));
        t.w_ee = detail::sparse_from_json(l.at("w_ee"));
        t.w_ei = detail::sparse_from_json(l.at("w_ei"));
        t.w_ie = detail::sparse_from_json(l.at("w_ie"));
        t.w_ii = detail::sparse_from_json(l.at("w_ii"));
        if (t.w_pe.rows() != tc.n_input || t.w_pe.cols() != tc.n_exc || t.w_ee.rows() != tc.n_exc ||
            t.w_ei.cols() != tc.n_inh || t.w_ie.rows() != tc.n_inh || t.w_ii.rows() != tc.n_inh)
            throw model_error("liquid matrix shapes do not match the stored sizes");
        m.readout = detail::params_from_json(j.at("readout"));
        if (m.readout.inputs() != static_cast<Eigen::Index>(tc.n_exc))
            throw model_error("readout input size does not match the liquid");
        const auto& o = j.at("optimizer");
        m.optimizer.hyper = {o.at("learning_rate").get<double>(), o.at("smoothing").get<double>(),
                             o.at("epsilon").get<double>(), o.at("weight_decay").get<double>()};
        m.optimizer.sq_avg = detail::params_from_json(o.at("sq_avg"));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw model_error(std::string("malformed model container: ") + e.what());
    }
}

inline void save_model(const model& m, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw model_error("cannot write " + path.string());
    out << model_to_json(m).dump() << '\n';
}

inline model load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw model_error("cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw model_error(path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace lsmrl
