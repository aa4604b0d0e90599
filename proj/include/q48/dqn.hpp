#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "q48/game.hpp"
#include "q48/nn.hpp"

namespace q48 {

struct Transition {
    Encoding s;
    Action a;
    double r;
    Encoding s_next;
    bool terminal;
    std::vector<Action> legal_next;  // empty iff terminal
};

struct TrainConfig {
    int games = 1000;
    double epsilon = 0.3;
    int batch_size = 128;
    double gamma = 1.0;
    double lr = 5e-4;
    double dropout_rate = 0.2;
    uint64_t seed = 0;
};

// Eval-mode Q-values restricted to the legal actions.
inline std::vector<std::pair<Action, double>>
masked_q(const QNetwork& net, const Encoding& state, const std::vector<Action>& legal) {
    if (legal.empty()) throw std::invalid_argument("masked_q: empty legal set");
    Rng unused(0);
    auto [q, cache] = forward(net, state, Mode::Eval, unused);
    std::vector<std::pair<Action, double>> out;
    out.reserve(legal.size());
    for (Action a : legal) out.emplace_back(a, q[static_cast<int>(a)]);
    return out;
}

// Greedy masked argmax; ties go to the lowest action index. legal must be
// in ascending index order (as legal_actions returns it).
inline Action masked_argmax(const QNetwork& net, const Encoding& state,
                            const std::vector<Action>& legal) {
    auto qs = masked_q(net, state, legal);
    auto best = qs.front();
    for (const auto& [a, q] : qs)
        if (q > best.second) best = {a, q};
    return best.first;
}

// With probability epsilon, a uniform legal action; otherwise the masked
// argmax. Never returns an illegal action.
inline Action select_action(const QNetwork& net, const Encoding& state,
                            const std::vector<Action>& legal, double epsilon,
                            Rng& rng) {
    if (legal.empty()) throw std::invalid_argument("select_action: empty legal set");
    if (rng.next_double() < epsilon)
        return legal[rng.uniform_int(static_cast<uint32_t>(legal.size()))];
    return masked_argmax(net, state, legal);
}

// r for terminal transitions, else r + gamma * max over legal next actions.
inline double td_target(const Transition& t, const QNetwork& net, double gamma) {
    if (t.terminal) return t.r;
    auto qs = masked_q(net, t.s_next, t.legal_next);
    double best = qs.front().second;
    for (const auto& [a, q] : qs) best = std::max(best, q);
    return t.r + gamma * best;
}

// One update on a batch: all targets are computed against the current net
// first (frozen for the whole batch), then gradients of the mean MSE on the
// Q(s, a) coordinate are accumulated and applied in a single Adam step.
// Returns the mean loss. The caller clears the batch.
inline double train_step(QNetwork& net, OptimizerState& opt,
                         std::span<const Transition> batch, double gamma,
                         double lr, Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
    std::vector<double> targets;
    targets.reserve(batch.size());
    for (const Transition& t : batch) targets.push_back(td_target(t, net, gamma));

    Gradients total(net);
    double loss_sum = 0.0;
    double inv_n = 1.0 / static_cast<double>(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        auto [q, cache] = forward(net, t.s, Mode::Train, rng);
        auto [loss, dq] = mse_td_loss(q[static_cast<int>(t.a)], targets[i]);
        loss_sum += loss;
        std::array<double, 4> grad_q{};
        grad_q[static_cast<int>(t.a)] = dq * inv_n;
        total.add(backward(net, cache, grad_q));
    }
    optimizer_step(net, opt, total, lr);
    return loss_sum * inv_n;
}

struct GameLogEntry {
    int game;
    long long score;
    int max_tile;
    int moves;
    double mean_loss;  // mean per-transition loss over the game's updates
};

struct TrainOutput {
    QNetwork net;
    std::vector<GameLogEntry> log;
};

// On-policy accumulation: transitions collect in a batch that is flushed
// through train_step when it reaches batch_size or the game ends, then
// cleared. No replay memory, no target network.
inline TrainOutput train(const TrainConfig& config) {
    Rng init_rng(derive_stream(config.seed, 0xfeedbeefULL));
    TrainOutput out;
    out.net = init_network(init_rng, config.dropout_rate);
    OptimizerState opt(out.net);
    Rng dropout_rng(derive_stream(config.seed, 0xd20ULL));

    std::vector<Transition> batch;
    batch.reserve(config.batch_size);
    for (int g = 0; g < config.games; ++g) {
        Rng rng(derive_stream(config.seed, static_cast<uint64_t>(g)));
        GameState state = new_game(rng);
        double loss_weighted = 0.0;
        int trained = 0;
        auto flush = [&] {
            if (batch.empty()) return;
            double loss = train_step(out.net, opt, batch, config.gamma, config.lr,
                                     dropout_rng);
            loss_weighted += loss * static_cast<double>(batch.size());
            trained += static_cast<int>(batch.size());
            batch.clear();
        };
        bool terminal = is_terminal(state.board);
        while (!terminal) {
            std::vector<Action> legal = legal_actions(state.board);
            Encoding s = encode_onehot(state.board);
            Action a = select_action(out.net, s, legal, config.epsilon, rng);
            StepResult res = step(state, a, rng);
            batch.push_back({std::move(s), a, static_cast<double>(res.reward),
                             encode_onehot(res.state.board), res.terminal,
                             res.terminal ? std::vector<Action>{}
                                          : legal_actions(res.state.board)});
            if (static_cast<int>(batch.size()) == config.batch_size) flush();
            state = res.state;
            terminal = res.terminal;
        }
        flush();
        out.log.push_back({g, state.score, max_tile(state.board), state.moves,
                           trained > 0 ? loss_weighted / trained : 0.0});
    }
    return out;
}

// Greedy play (epsilon = 0, Eval mode), per-game seeds derived from `seed`.
inline std::vector<GameResult> evaluate(const QNetwork& net, int games,
                                        uint64_t seed) {
    std::vector<GameResult> results;
    results.reserve(games);
    for (int g = 0; g < games; ++g) {
        uint64_t game_seed = derive_stream(seed, static_cast<uint64_t>(g));
        Rng rng(game_seed);
        auto t0 = std::chrono::steady_clock::now();
        GameState state = new_game(rng);
        while (!is_terminal(state.board)) {
            Action a = masked_argmax(net, encode_onehot(state.board),
                                     legal_actions(state.board));
            state = step(state, a, rng).state;
        }
        double dt = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0).count();
        results.push_back({game_seed, max_tile(state.board), state.score,
                           state.moves, dt});
    }
    return results;
}

} // namespace q48
