#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "q48/game.hpp"
#include "q48/heuristic.hpp"

namespace q48 {

struct BeamConfig {
    int depth = 20;
    int width = 10;
};

struct BeamNode {
    Board board;
    Action initial_action;   // root edge this node descends from
    double score;
    bool alive;
    uint64_t birth_index;    // creation counter, breaks score ties
};

namespace detail {

inline BeamNode make_node(Board b, Action initial, const HeuristicWeights& w,
                          uint64_t& birth) {
    bool alive = !is_terminal(b);
    double score = alive ? goodness(b, w) : w.death_penalty;
    return {b, initial, score, alive, birth++};
}

} // namespace detail

// One node per legal root action: apply the move, then sample a single
// spawn (determinization, no averaging over spawn outcomes).
inline std::vector<BeamNode> root_expand(const Board& board,
                                         const HeuristicWeights& weights,
                                         Rng& rng, uint64_t& birth) {
    if (is_terminal(board)) throw std::invalid_argument("root_expand: terminal board");
    std::vector<BeamNode> nodes;
    for (Action a : kAllActions) {
        MoveOutcome mo = apply_move(board, a);
        if (!mo.changed) continue;
        spawn_tile(mo.board, rng);
        nodes.push_back(detail::make_node(mo.board, a, weights, birth));
    }
    return nodes;
}

// Children inherit the parent's initial_action. Dead nodes pass through
// unchanged so a losing line stays comparable and the beam never empties.
inline std::vector<BeamNode> expand_level(const std::vector<BeamNode>& nodes,
                                          const HeuristicWeights& weights,
                                          Rng& rng, uint64_t& birth) {
    std::vector<BeamNode> out;
    for (const BeamNode& n : nodes) {
        if (!n.alive) {
            out.push_back(n);
            continue;
        }
        for (Action a : kAllActions) {
            MoveOutcome mo = apply_move(n.board, a);
            if (!mo.changed) continue;
            spawn_tile(mo.board, rng);
            out.push_back(detail::make_node(mo.board, n.initial_action, weights, birth));
        }
    }
    return out;
}

// Keep the k best by score, descending; ties go to the earlier-created node.
inline std::vector<BeamNode> prune(std::vector<BeamNode> nodes, int k) {
    std::sort(nodes.begin(), nodes.end(), [](const BeamNode& a, const BeamNode& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.birth_index < b.birth_index;
    });
    if (static_cast<int>(nodes.size()) > k) nodes.resize(k);
    return nodes;
}

// Depth counts total expansion levels including the root expansion, so
// depth = 20 is a 20-ply lookahead. Each call derives a fresh sub-stream
// from the game rng, keeping full games seed-reproducible regardless of
// how many draws the search makes.
inline Action choose_action(const Board& board, const BeamConfig& config,
                            const HeuristicWeights& weights, Rng& game_rng) {
    Rng rng(game_rng.next_u64());
    uint64_t birth = 0;
    std::vector<BeamNode> beam = root_expand(board, weights, rng, birth);
    beam = prune(std::move(beam), config.width);
    for (int level = 1; level < config.depth; ++level) {
        beam = expand_level(beam, weights, rng, birth);
        beam = prune(std::move(beam), config.width);
    }
    const BeamNode* best = &beam.front();
    for (const BeamNode& n : beam) {
        if (n.score > best->score ||
            (n.score == best->score && n.birth_index < best->birth_index))
            best = &n;
    }
    return best->initial_action;
}

} // namespace q48
