#pragma once

// Gridworld Pacman with random-walk ghosts.

#include "lsmrl/encoding.hpp"
#include "lsmrl/envs/environment.hpp"
#include "lsmrl/rng.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lsmrl {

struct cell {
    int row = 0;
    int col = 0;
    bool operator==(const cell&) const = default;
    auto operator<=>(const cell&) const = default;
};

struct pacman_layout {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<char> walls;  // row-major
    cell pacman_start;
    std::vector<cell> ghost_starts;
    std::vector<cell> food;
    std::vector<cell> cherries;

    bool wall(cell c) const
    {
        if (c.row < 0 || c.col < 0 || c.row >= static_cast<int>(rows) || c.col >= static_cast<int>(cols))
            return true;
        return walls[static_cast<std::size_t>(c.row) * cols + static_cast<std::size_t>(c.col)] != 0;
    }
};

struct layout_error : std::runtime_error {
    layout_error(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error("layout line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                             what),
          line(line), column(column)
    {}
    std::size_t line;
    std::size_t column;
};

/// Parses an ASCII layout: '%' wall, '.' food, 'o' cherry, 'G' ghost,
/// 'P' pacman, ' ' empty. Lines and columns in errors are 1-based.
inline pacman_layout load_layout(std::string_view text)
{
    std::vector<std::string> lines;
    {
        std::string line;
        std::istringstream in{std::string(text)};
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
        while (!lines.empty() && lines.back().empty()) lines.pop_back();
    }
    if (lines.empty()) throw layout_error("empty layout", 1, 1);

    pacman_layout out;
    out.rows = lines.size();
    out.cols = lines.front().size();
    if (out.cols == 0) throw layout_error("empty row", 1, 1);
    out.walls.assign(out.rows * out.cols, 0);
    bool have_pacman = false;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        if (lines[r].size() != out.cols)
            throw layout_error("row length " + std::to_string(lines[r].size()) + " differs from " +
                                   std::to_string(out.cols),
                               r + 1, std::min(lines[r].size(), out.cols) + 1);
        for (std::size_t c = 0; c < out.cols; ++c) {
            const cell here{static_cast<int>(r), static_cast<int>(c)};
            switch (lines[r][c]) {
            case '%': out.walls[r * out.cols + c] = 1; break;
            case '.': out.food.push_back(here); break;
            case 'o': out.cherries.push_back(here); break;
            case 'G': out.ghost_starts.push_back(here); break;
            case 'P':
                if (have_pacman) throw layout_error("second 'P'", r + 1, c + 1);
                have_pacman = true;
                out.pacman_start = here;
                break;
            case ' ': break;
            default: throw layout_error(std::string("unknown character '") + lines[r][c] + "'", r + 1, c + 1);
            }
        }
    }
    if (!have_pacman) throw layout_error("missing 'P'", out.rows, 1);
    return out;
}

/// Layouts shipped with the library, keyed by "<rows>x<cols>".
inline const std::map<std::string, std::string_view>& bundled_layouts()
{
    static const std::map<std::string, std::string_view> layouts{
        {"7x7",
         "%%%%%%%\n"
         "%P   .%\n"
         "% % % %\n"
         "%  .  %\n"
         "% % % %\n"
         "%.   G%\n"
         "%%%%%%%\n"},
        {"7x17",
         "%%%%%%%%%%%%%%%%%\n"
         "%P  .   %   .  o%\n"
         "% %%%% %%% %%%% %\n"
         "%   .   G     . %\n"
         "% %%%% %%% %%%% %\n"
         "%o  .   %G  .   %\n"
         "%%%%%%%%%%%%%%%%%\n"},
        {"17x19",
         "%%%%%%%%%%%%%%%%%%%\n"
         "%P               .%\n"
         "% % % % % % % % % %\n"
         "%         %       %\n"
         "% %%%%% % % % % % %\n"
         "%      .          %\n"
         "% % % % % %%% % % %\n"
         "%            .    %\n"
         "% %%% % % % % %%% %\n"
         "%        G        %\n"
         "% % % %%% % % % % %\n"
         "%  .              %\n"
         "% % % % % % %%%%% %\n"
         "%       %         %\n"
         "% % % % % % % % % %\n"
         "%.         .      %\n"
         "%%%%%%%%%%%%%%%%%%%\n"},
    };
    return layouts;
}

inline pacman_layout bundled_layout(const std::string& name)
{
    const auto& all = bundled_layouts();
    auto it = all.find(name);
    if (it == all.end()) throw std::invalid_argument("unknown bundled layout '" + name + "'");
    return load_layout(it->second);
}

enum class pacman_action : std::size_t { up = 0, down = 1, left = 2, right = 3, stay = 4 };

inline cell move(cell c, pacman_action a)
{
    switch (a) {
    case pacman_action::up: return {c.row - 1, c.col};
    case pacman_action::down: return {c.row + 1, c.col};
    case pacman_action::left: return {c.row, c.col - 1};
    case pacman_action::right: return {c.row, c.col + 1};
    case pacman_action::stay: break;
    }
    return c;
}

struct pacman_options {
    int scared_steps = 40;
    /// Episode length cap; 0 disables it.
    int max_steps = 0;
};

/// Pacman moves first (walls block), then each ghost takes a uniformly
/// random legal step. Food, cherries and scared ghosts are worth +1;
/// clearing the food adds +1 and ends the game. Meeting a non-scared ghost
/// ends the game and the step's reward is 0.
class pacman_env final : public environment {
public:
    struct ghost {
        cell pos;
        int scared = 0;  // remaining scared steps
    };

    static constexpr std::size_t n_planes = 5;

    pacman_env(pacman_layout layout, std::uint64_t seed, pacman_options options = {})
        : layout_(std::move(layout)), options_(options), rng_(make_stream(seed, "pacman"))
    {
        reset();
    }

    std::string name() const override { return "pacman"; }
    std::size_t action_count() const override { return 5; }

    void reset() override
    {
        pacman_ = layout_.pacman_start;
        ghosts_.clear();
        for (auto g : layout_.ghost_starts) ghosts_.push_back({g, 0});
        food_ = layout_.food;
        cherries_ = layout_.cherries;
        steps_ = 0;
        done_ = false;
    }

    step_result step(std::size_t action) override
    {
        if (done_) throw episode_finished("pacman: step after terminal; call reset()");
        if (action >= 5) throw std::out_of_range("pacman: invalid action");
        ++steps_;
        double reward = 0.0;

        const cell target = move(pacman_, static_cast<pacman_action>(action));
        if (!layout_.wall(target)) pacman_ = target;

        if (!resolve_contacts(reward)) return finish(0.0);

        if (take(food_, pacman_)) {
            reward += 1.0;
            if (food_.empty()) return finish(reward + 1.0);
        }
        if (take(cherries_, pacman_)) {
            reward += 1.0;
            for (auto& g : ghosts_) g.scared = options_.scared_steps;
        }

        for (auto& g : ghosts_) g.pos = random_ghost_move(g.pos);
        if (!resolve_contacts(reward)) return finish(0.0);

        for (auto& g : ghosts_)
            if (g.scared > 0) --g.scared;

        if (options_.max_steps > 0 && steps_ >= options_.max_steps) return finish(reward);
        return {reward, false};
    }

    bool terminal() const override { return done_; }

    /// Five planes (pacman, food, cherry, ghost, scared ghost) as 0/1.
    std::vector<binary_plane> planes() const
    {
        std::vector<binary_plane> p(n_planes, binary_plane(layout_.rows, layout_.cols));
        auto set = [&](std::size_t k, cell c) {
            p[k](static_cast<std::size_t>(c.row), static_cast<std::size_t>(c.col)) = 1;
        };
        set(0, pacman_);
        for (auto c : food_) set(1, c);
        for (auto c : cherries_) set(2, c);
        for (const auto& g : ghosts_) set(g.scared > 0 ? 4 : 3, g.pos);
        return p;
    }

    std::vector<double> observation() const override
    {
        std::vector<double> out;
        out.reserve(encoded_size());
        for (const auto& plane : planes())
            for (char c : plane.cells) out.push_back(c ? 1.0 : 0.0);
        return out;
    }

    rate_vector encode(double phi_max) const override
    {
        const auto p = planes();
        return encode_binary_planes(p, phi_max);
    }

    std::size_t encoded_size() const override { return n_planes * layout_.rows * layout_.cols; }

    const pacman_layout& layout() const { return layout_; }
    cell pacman() const { return pacman_; }
    const std::vector<ghost>& ghosts() const { return ghosts_; }
    const std::vector<cell>& food() const { return food_; }
    const std::vector<cell>& cherries() const { return cherries_; }
    int steps() const { return steps_; }

    /// Legal ghost moves in the fixed order up, down, left, right.
    std::vector<cell> ghost_moves(cell from) const
    {
        std::vector<cell> moves;
        for (auto a : {pacman_action::up, pacman_action::down, pacman_action::left, pacman_action::right}) {
            const cell c = move(from, a);
            if (!layout_.wall(c)) moves.push_back(c);
        }
        return moves;
    }

private:
    step_result finish(double reward)
    {
        done_ = true;
        return {reward, true};
    }

    static bool take(std::vector<cell>& items, cell at)
    {
        auto it = std::find(items.begin(), items.end(), at);
        if (it == items.end()) return false;
        items.erase(it);
        return true;
    }

    cell random_ghost_move(cell from)
    {
        const auto moves = ghost_moves(from);
        if (moves.empty()) return from;
        return moves[uniform_index(rng_, moves.size())];
    }

    // Scared ghosts on pacman's cell are eaten and respawn; returns false if
    // a non-scared ghost caught pacman.
    bool resolve_contacts(double& reward)
    {
        for (std::size_t k = 0; k < ghosts_.size(); ++k) {
            auto& g = ghosts_[k];
            if (g.pos != pacman_) continue;
            if (g.scared <= 0) return false;
            reward += 1.0;
            g = {layout_.ghost_starts[k], 0};
        }
        return true;
    }

    pacman_layout layout_;
    pacman_options options_;
    rng_t rng_;
    cell pacman_;
    std::vector<ghost> ghosts_;
    std::vector<cell> food_;
    std::vector<cell> cherries_;
    int steps_ = 0;
    bool done_ = false;
};

}  // namespace lsmrl
