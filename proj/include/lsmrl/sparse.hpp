#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lsmrl {

/// Compressed sparse row matrix of synaptic weights.
///
/// Rows are presynaptic neurons and columns postsynaptic neurons, so the
/// outgoing synapses of a spiking neuron are one contiguous run. Column
/// indices are strictly increasing within a row.
class sparse_matrix {
public:
    struct entry {
        std::uint32_t row;
        std::uint32_t col;
        double value;
    };

    sparse_matrix() = default;
    sparse_matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0)
    {}

    /// Builds from triplets. Duplicate (row, col) pairs and out-of-range
    /// indices are rejected; zero values are dropped.
    static sparse_matrix from_triplets(std::size_t rows, std::size_t cols, std::vector<entry> entries)
    {
        std::sort(entries.begin(), entries.end(), [](const entry& a, const entry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        sparse_matrix m(rows, cols);
        m.cols_idx_.reserve(entries.size());
        m.values_.reserve(entries.size());
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const auto& e = entries[k];
            if (e.row >= rows || e.col >= cols)
                throw std::out_of_range("sparse_matrix: triplet index out of range");
            if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col)
                throw std::invalid_argument("sparse_matrix: duplicate triplet");
            if (e.value == 0.0) continue;
            m.cols_idx_.push_back(e.col);
            m.values_.push_back(e.value);
            ++m.row_ptr_[e.row + 1];
        }
        for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::span<const std::uint32_t> row_cols(std::size_t r) const
    {
        return {cols_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }
    std::span<const double> row_values(std::size_t r) const
    {
        return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }

    /// Weight at (r, c), zero when absent.
    double at(std::size_t r, std::size_t c) const
    {
        auto cs = row_cols(r);
        auto it = std::lower_bound(cs.begin(), cs.end(), static_cast<std::uint32_t>(c));
        if (it == cs.end() || *it != c) return 0.0;
        return row_values(r)[static_cast<std::size_t>(it - cs.begin())];
    }

    std::vector<entry> triplets() const
    {
        std::vector<entry> out;
        out.reserve(nnz());
        for (std::size_t r = 0; r < rows_; ++r) {
            auto cs = row_cols(r);
            auto vs = row_values(r);
            for (std::size_t k = 0; k < cs.size(); ++k)
                out.push_back({static_cast<std::uint32_t>(r), cs[k], vs[k]});
        }
        return out;
    }

    /// Number of nonzeros in each column (fan-in of each postsynaptic neuron).
    std::vector<std::size_t> col_counts() const
    {
        std::vector<std::size_t> counts(cols_, 0);
        for (auto c : cols_idx_) ++counts[c];
        return counts;
    }

    bool operator==(const sparse_matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> cols_idx_;
    std::vector<double> values_;
};

}  // namespace lsmrl
