#pragma once

// Observation -> Poisson firing-rate encoders.

#include "lsmrl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lsmrl {

/// Per-input-neuron firing rates in Hz, each in [0, phi_max].
struct rate_vector {
    std::vector<double> rates;
    double phi_max = 100.0;

    std::size_t size() const { return rates.size(); }
};

/// Closed interval used to clip one observation dimension.
struct value_range {
    double lo;
    double hi;
};

inline void check_phi_max(double phi_max)
{
    if (!(phi_max >= 0.0 && phi_max <= 1000.0))
        throw std::invalid_argument("phi_max must lie in [0, 1000] Hz");
}

/// Draws one simulation step of independent Poisson spikes; each neuron
/// fires with probability rate * dt / 1000.
inline void poisson_step(const rate_vector& rates, rng_t& rng, std::vector<char>& spikes, double dt_ms = 1.0)
{
    spikes.assign(rates.size(), 0);
    const double scale = dt_ms / 1000.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const double p = rates.rates[i] * scale;
        if (p > 0.0) spikes[i] = uniform01(rng) < p;
    }
}

inline std::vector<char> poisson_step(const rate_vector& rates, rng_t& rng)
{
    std::vector<char> spikes;
    poisson_step(rates, rng, spikes);
    return spikes;
}

/// Index of the level that `value` falls into after clipping to `range`.
/// Bins are equal-width, left-closed and right-open; both ends clamp.
inline std::size_t level_index(double value, value_range range, std::size_t levels)
{
    if (std::isnan(value)) throw std::invalid_argument("encode_levels: NaN observation");
    const double clipped = std::clamp(value, range.lo, range.hi);
    const double pos = std::floor((clipped - range.lo) / (range.hi - range.lo) * static_cast<double>(levels));
    if (pos <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(pos), levels - 1);
}

/// One-hot level code: `levels` neurons per dimension, the selected one at
/// phi_max and the rest silent.
inline rate_vector encode_levels(std::span<const double> values, std::span<const value_range> ranges,
                                 std::size_t levels = 10, double phi_max = 100.0)
{
    check_phi_max(phi_max);
    if (values.size() != ranges.size())
        throw std::invalid_argument("encode_levels: values and ranges differ in length");
    if (levels == 0) throw std::invalid_argument("encode_levels: levels must be positive");
    rate_vector out{std::vector<double>(values.size() * levels, 0.0), phi_max};
    for (std::size_t d = 0; d < values.size(); ++d) {
        const auto r = ranges[d];
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi))
            throw std::invalid_argument("encode_levels: range must be finite with lo < hi");
        out.rates[d * levels + level_index(values[d], r, levels)] = phi_max;
    }
    return out;
}

/// Row-major boolean grid.
struct binary_plane {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<char> cells;

    binary_plane() = default;
    binary_plane(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c, 0) {}

    char& operator()(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
    char operator()(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
};

/// Flattens planes row-major and concatenates them in the given order;
/// set cells fire at phi_max.
inline rate_vector encode_binary_planes(std::span<const binary_plane> planes, double phi_max = 100.0)
{
    check_phi_max(phi_max);
    rate_vector out{{}, phi_max};
    if (planes.empty()) return out;
    const auto rows = planes.front().rows;
    const auto cols = planes.front().cols;
    out.rates.reserve(planes.size() * rows * cols);
    for (const auto& p : planes) {
        if (p.rows != rows || p.cols != cols || p.cells.size() != rows * cols)
            throw std::invalid_argument("encode_binary_planes: planes differ in dimensions");
        for (char c : p.cells) out.rates.push_back(c ? phi_max : 0.0);
    }
    return out;
}

}  // namespace lsmrl
