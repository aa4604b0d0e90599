#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "q48/board.hpp"

namespace q48 {

struct HeuristicWeights {
    double w_empty = 2.7;
    double w_max = 1.0;
    double w_smooth = 0.1;
    double w_mono = 1.0;
    double death_penalty = -1e6;
};

// Negated sum of |e_i - e_j| over adjacent nonempty pairs. Empty cells are
// skipped so a gap does not register as roughness.
inline double smoothness(const Board& b) {
    int total = 0;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            int e = b.at(r, c);
            if (e == 0) continue;
            if (c < 3 && b.at(r, c + 1) != 0) total += std::abs(e - b.at(r, c + 1));
            if (r < 3 && b.at(r + 1, c) != 0) total += std::abs(e - b.at(r + 1, c));
        }
    }
    return -total;
}

// Per line, penalty for breaking whichever ordering (increasing or
// decreasing) it fits better; empties count as exponent 0. Summed over the
// 4 rows and 4 columns. Always <= 0.
inline double monotonicity(const Board& b) {
    int total = 0;
    auto line_score = [](int a0, int a1, int a2, int a3) {
        int line[4] = {a0, a1, a2, a3};
        int up = 0, down = 0;
        for (int i = 0; i < 3; ++i) {
            int d = line[i + 1] - line[i];
            if (d > 0) up += d;
            else down -= d;
        }
        return -std::min(up, down);
    };
    for (int r = 0; r < 4; ++r)
        total += line_score(b.at(r, 0), b.at(r, 1), b.at(r, 2), b.at(r, 3));
    for (int c = 0; c < 4; ++c)
        total += line_score(b.at(0, c), b.at(1, c), b.at(2, c), b.at(3, c));
    return total;
}

inline double goodness(const Board& b, const HeuristicWeights& w) {
    if (is_terminal(b)) return w.death_penalty;
    return w.w_empty * count_empty(b) + w.w_max * max_exponent(b) +
           w.w_smooth * smoothness(b) + w.w_mono * monotonicity(b);
}

} // namespace q48
