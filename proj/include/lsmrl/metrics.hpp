#pragma once

// CSV exports of training curves: one file per seed and a per-epoch
// summary across seeds.

#include "lsmrl/agent.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsmrl {

inline constexpr const char* metrics_schema = "# schema: lsmrl.metrics/1";
inline constexpr const char* summary_schema = "# schema: lsmrl.summary/1";

/// Percentile with linear interpolation between closest ranks, q in [0, 1].
inline double percentile(std::vector<double> v, double q)
{
    if (v.empty()) throw std::invalid_argument("percentile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q must lie in [0, 1]");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline std::string metrics_csv(std::span<const epoch_metrics> history)
{
    std::string out = metrics_schema;
    out += "\nepoch,steps,train_reward,train_gameplays,eval_reward,eval_gameplays,epsilon,loss,updates\n";
    for (const auto& m : history)
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", m.epoch, m.steps, m.train_reward, m.train_gameplays,
                           m.eval_reward, m.eval_gameplays, m.epsilon, m.loss, m.updates);
    return out;
}

struct summary_row {
    std::uint64_t epoch = 0;
    double median = 0.0;
    double p25 = 0.0;
    double p75 = 0.0;
};

/// Evaluation reward statistics across seeds, one row per epoch.
inline std::vector<summary_row> summarize(std::span<const std::vector<epoch_metrics>> runs)
{
    if (runs.empty()) return {};
    std::size_t epochs = runs.front().size();
    for (const auto& r : runs) epochs = std::min(epochs, r.size());
    std::vector<summary_row> rows;
    rows.reserve(epochs);
    for (std::size_t e = 0; e < epochs; ++e) {
        std::vector<double> v;
        v.reserve(runs.size());
        for (const auto& r : runs) v.push_back(r[e].eval_reward);
        rows.push_back({runs.front()[e].epoch, percentile(v, 0.5), percentile(v, 0.25), percentile(v, 0.75)});
    }
    return rows;
}

inline std::string summary_csv(std::span<const summary_row> rows)
{
    std::string out = summary_schema;
    out += "\nepoch,eval_reward_median,eval_reward_p25,eval_reward_p75\n";
    for (const auto& r : rows) out += fmt::format("{},{},{},{}\n", r.epoch, r.median, r.p25, r.p75);
    return out;
}

/// Mean of the per-epoch median over the last `last` epochs.
inline double final_median(std::span<const summary_row> rows, std::size_t last)
{
    if (rows.empty() || last == 0) throw std::invalid_argument("final_median: nothing to average");
    last = std::min(last, rows.size());
    double s = 0.0;
    for (std::size_t i = rows.size() - last; i < rows.size(); ++i) s += rows[i].median;
    return s / static_cast<double>(last);
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace lsmrl
