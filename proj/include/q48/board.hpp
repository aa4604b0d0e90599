#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace q48 {

// A cell stores the tile exponent: 0 = empty, e >= 1 = tile with value 2^e.
// Exponents are capped at 15 so a board always fits the 16-channel encoding.
inline constexpr int kMaxExponent = 15;

enum class Action : int { Left = 0, Up = 1, Right = 2, Down = 3 };

inline constexpr std::array<Action, 4> kAllActions = {
    Action::Left, Action::Up, Action::Right, Action::Down};

inline const char* action_name(Action a) {
    switch (a) {
        case Action::Left: return "left";
        case Action::Up: return "up";
        case Action::Right: return "right";
        case Action::Down: return "down";
    }
    return "?";
}

// 4x4 grid of exponents, row-major: cells[r * 4 + c].
struct Board {
    std::array<uint8_t, 16> cells{};

    uint8_t at(int r, int c) const { return cells[r * 4 + c]; }
    uint8_t& at(int r, int c) { return cells[r * 4 + c]; }

    bool operator==(const Board&) const = default;
};

using Row = std::array<uint8_t, 4>;

struct RowResult {
    Row row;
    int reward;
};

// Slide one line toward index 0 and merge equal neighbours. Merges resolve
// nearest the destination edge first and a merged tile never re-merges in
// the same move. Two exponent-15 tiles merge to 15 (saturation); the reward
// still counts 2^16 for that pair.
inline RowResult slide_and_merge_row(const Row& in) {
    Row out{};
    int reward = 0;
    int dst = 0;
    uint8_t pending = 0;
    for (uint8_t e : in) {
        if (e == 0) continue;
        if (pending == 0) {
            pending = e;
        } else if (pending == e) {
            reward += 1 << (e + 1);
            out[dst++] = static_cast<uint8_t>(std::min(e + 1, kMaxExponent));
            pending = 0;
        } else {
            out[dst++] = pending;
            pending = e;
        }
    }
    if (pending != 0) out[dst++] = pending;
    return {out, reward};
}

namespace detail {

// Cell index of position p (0 = destination edge) on line l for a move.
inline int line_cell(Action a, int l, int p) {
    switch (a) {
        case Action::Left: return l * 4 + p;
        case Action::Right: return l * 4 + (3 - p);
        case Action::Up: return p * 4 + l;
        case Action::Down: return (3 - p) * 4 + l;
    }
    return 0;
}

struct RowTableEntry {
    uint16_t result;
    uint16_t changed;
    uint32_t reward;
};

// All 16^4 line outcomes, precomputed once from slide_and_merge_row.
inline const std::array<RowTableEntry, 65536>& row_table() {
    static const auto table = [] {
        auto t = std::make_unique<std::array<RowTableEntry, 65536>>();
        for (uint32_t packed = 0; packed < 65536; ++packed) {
            Row row = {static_cast<uint8_t>(packed & 0xF),
                       static_cast<uint8_t>((packed >> 4) & 0xF),
                       static_cast<uint8_t>((packed >> 8) & 0xF),
                       static_cast<uint8_t>((packed >> 12) & 0xF)};
            RowResult res = slide_and_merge_row(row);
            uint16_t out = static_cast<uint16_t>(
                res.row[0] | (res.row[1] << 4) | (res.row[2] << 8) |
                (res.row[3] << 12));
            (*t)[packed] = {out, static_cast<uint16_t>(out != packed),
                            static_cast<uint32_t>(res.reward)};
        }
        return t;
    }();
    return *table;
}

} // namespace detail

struct MoveOutcome {
    Board board;
    int reward;
    bool changed;
};

inline MoveOutcome apply_move(const Board& b, Action a) {
    MoveOutcome out{b, 0, false};
    const auto& table = detail::row_table();
    for (int l = 0; l < 4; ++l) {
        uint32_t packed = 0;
        for (int p = 0; p < 4; ++p)
            packed |= static_cast<uint32_t>(b.cells[detail::line_cell(a, l, p)]) << (4 * p);
        const auto& e = table[packed];
        out.reward += static_cast<int>(e.reward);
        if (e.changed) {
            out.changed = true;
            for (int p = 0; p < 4; ++p)
                out.board.cells[detail::line_cell(a, l, p)] =
                    static_cast<uint8_t>((e.result >> (4 * p)) & 0xF);
        }
    }
    return out;
}

inline std::vector<Action> legal_actions(const Board& b) {
    std::vector<Action> out;
    for (Action a : kAllActions)
        if (apply_move(b, a).changed) out.push_back(a);
    return out;
}

inline bool is_terminal(const Board& b) {
    for (Action a : kAllActions)
        if (apply_move(b, a).changed) return false;
    return true;
}

inline int count_empty(const Board& b) {
    return static_cast<int>(std::count(b.cells.begin(), b.cells.end(), 0));
}

inline int max_exponent(const Board& b) {
    return *std::max_element(b.cells.begin(), b.cells.end());
}

// Tile value 2^(max exponent), 0 for an empty board.
inline int max_tile(const Board& b) {
    int e = max_exponent(b);
    return e == 0 ? 0 : (1 << e);
}

// --- one-hot encoding -------------------------------------------------------
//
// 256-element vector, channel-major: flat index = channel*16 + row*4 + col,
// all indices 0-based. Element is 1 iff the cell holds exponent `channel`;
// channel 0 marks empty cells, so each cell contributes exactly one 1.

using Encoding = std::array<double, 256>;

inline Encoding encode_onehot(const Board& b) {
    Encoding v{};
    for (int cell = 0; cell < 16; ++cell) v[b.cells[cell] * 16 + cell] = 1.0;
    return v;
}

inline Board decode_onehot(const Encoding& v) {
    Board b;
    for (int cell = 0; cell < 16; ++cell)
        for (int ch = 0; ch < 16; ++ch)
            if (v[ch * 16 + cell] != 0.0) b.cells[cell] = static_cast<uint8_t>(ch);
    return b;
}

// --- D4 symmetries ----------------------------------------------------------
//
// sym in [0, 8): sym = k + 4*t applies transpose (if t) then k clockwise
// quarter turns.

namespace detail {

inline Board rotate_cw(const Board& b) {
    Board out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out.at(c, 3 - r) = b.at(r, c);
    return out;
}

inline Board transpose(const Board& b) {
    Board out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out.at(c, r) = b.at(r, c);
    return out;
}

} // namespace detail

inline Board transform(const Board& b, int sym) {
    Board out = (sym & 4) ? detail::transpose(b) : b;
    for (int k = 0; k < (sym & 3); ++k) out = detail::rotate_cw(out);
    return out;
}

inline Action act_transform(Action a, int sym) {
    int v = static_cast<int>(a);
    if (sym & 4) v ^= 1;                 // transpose swaps left<->up, right<->down
    v = (v + (sym & 3)) % 4;             // clockwise turn maps left->up->right->down
    return static_cast<Action>(v);
}

inline std::string board_to_string(const Board& b) {
    std::string s;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            int e = b.at(r, c);
            std::string v = e == 0 ? "." : std::to_string(1 << e);
            s += std::string(6 - v.size(), ' ') + v;
        }
        s += '\n';
    }
    return s;
}

} // namespace q48
