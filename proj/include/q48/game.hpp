#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "q48/board.hpp"
#include "q48/rng.hpp"

namespace q48 {

struct GameState {
    Board board;
    long long score = 0;
    int moves = 0;
};

struct SpawnInfo {
    int cell;          // row-major cell index
    uint8_t exponent;  // 1 (tile 2) or 2 (tile 4)
};

// Places one tile on a uniformly chosen empty cell: exponent 1 with
// probability 0.9, exponent 2 with probability 0.1. Draw order is cell
// first, then value.
inline SpawnInfo spawn_tile(Board& b, Rng& rng) {
    int empties[16];
    int n = 0;
    for (int i = 0; i < 16; ++i)
        if (b.cells[i] == 0) empties[n++] = i;
    if (n == 0) throw std::logic_error("spawn_tile: board is full");
    int cell = empties[rng.uniform_int(static_cast<uint32_t>(n))];
    uint8_t e = rng.bernoulli(0.1) ? 2 : 1;
    b.cells[cell] = e;
    return {cell, e};
}

struct StepResult {
    GameState state;
    int reward;
    bool terminal;
    SpawnInfo spawn;
};

inline StepResult step(const GameState& s, Action a, Rng& rng) {
    MoveOutcome mo = apply_move(s.board, a);
    if (!mo.changed)
        throw std::invalid_argument(std::string("step: illegal action '") +
                                    action_name(a) + "'");
    StepResult res;
    res.state.board = mo.board;
    res.spawn = spawn_tile(res.state.board, rng);
    res.state.score = s.score + mo.reward;
    res.state.moves = s.moves + 1;
    res.reward = mo.reward;
    res.terminal = is_terminal(res.state.board);
    return res;
}

inline GameState new_game(Rng& rng) {
    GameState s;
    spawn_tile(s.board, rng);
    spawn_tile(s.board, rng);
    return s;
}

struct GameResult {
    uint64_t seed = 0;
    int max_tile = 0;
    long long score = 0;
    int moves = 0;
    double duration_s = 0.0;
};

} // namespace q48
