#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "q48/beam.hpp"
#include "q48/dqn.hpp"
#include "q48/game.hpp"

namespace q48 {

// --- config -----------------------------------------------------------------
//
// Flat `key = value` text, '#' starts a comment. CLI flags override file
// values.

class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("config: cannot open " + path);
        Config cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trim = [](std::string s) {
                size_t a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string();
                size_t b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            std::string t = trim(line);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config: malformed line " +
                                         std::to_string(lineno) + " in " + path);
            cfg.values_[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get_double(const std::string& key, double dflt) const {
        auto it = values_.find(key);
        return it == values_.end() ? dflt : std::stod(it->second);
    }
    int get_int(const std::string& key, int dflt) const {
        auto it = values_.find(key);
        return it == values_.end() ? dflt : std::stoi(it->second);
    }

    HeuristicWeights heuristic_weights() const {
        HeuristicWeights w;
        w.w_empty = get_double("heuristic.w_empty", w.w_empty);
        w.w_max = get_double("heuristic.w_max", w.w_max);
        w.w_smooth = get_double("heuristic.w_smooth", w.w_smooth);
        w.w_mono = get_double("heuristic.w_mono", w.w_mono);
        w.death_penalty = get_double("heuristic.death_penalty", w.death_penalty);
        return w;
    }
    BeamConfig beam_config() const {
        BeamConfig b;
        b.depth = get_int("beam.depth", b.depth);
        b.width = get_int("beam.width", b.width);
        return b;
    }
    TrainConfig train_config() const {
        TrainConfig t;
        t.games = get_int("dqn.games", t.games);
        t.epsilon = get_double("dqn.epsilon", t.epsilon);
        t.batch_size = get_int("dqn.batch_size", t.batch_size);
        t.gamma = get_double("dqn.gamma", t.gamma);
        t.lr = get_double("dqn.lr", t.lr);
        t.dropout_rate = get_double("dqn.dropout_rate", t.dropout_rate);
        return t;
    }

private:
    std::map<std::string, std::string> values_;
};

// --- agents -----------------------------------------------------------------

enum class AgentKind { Random, Beam, Dqn };

struct AgentSpec {
    AgentKind kind = AgentKind::Random;
    BeamConfig beam;
    HeuristicWeights weights;
    QNetwork net;  // used when kind == Dqn
};

inline AgentSpec make_random_agent() { return {}; }

inline AgentSpec make_beam_agent(BeamConfig cfg = {}, HeuristicWeights w = {}) {
    AgentSpec s;
    s.kind = AgentKind::Beam;
    s.beam = cfg;
    s.weights = w;
    return s;
}

inline AgentSpec make_dqn_agent(QNetwork net) {
    AgentSpec s;
    s.kind = AgentKind::Dqn;
    s.net = std::move(net);
    return s;
}

inline Action agent_choose(const AgentSpec& agent, const Board& board,
                           const std::vector<Action>& legal, Rng& rng) {
    switch (agent.kind) {
        case AgentKind::Random:
            return legal[rng.uniform_int(static_cast<uint32_t>(legal.size()))];
        case AgentKind::Beam:
            return choose_action(board, agent.beam, agent.weights, rng);
        case AgentKind::Dqn:
            return masked_argmax(agent.net, encode_onehot(board), legal);
    }
    throw std::logic_error("unknown agent kind");
}

// --- games and transcripts --------------------------------------------------
//
// Transcript is JSON-lines, one record per move:
//   {"game", "move", "board" (16 exponents before the move), "action",
//    "reward", "spawn_cell", "spawn_exponent"}
// followed by a final record carrying the game result.

struct GameRun {
    GameResult result;
    std::string transcript;  // empty unless requested
};

inline GameRun play_one_game(const AgentSpec& agent, uint64_t game_seed,
                             int game_index, bool record_transcript) {
    Rng rng(game_seed);
    GameRun run;
    std::ostringstream tr;
    auto t0 = std::chrono::steady_clock::now();
    GameState state = new_game(rng);
    while (!is_terminal(state.board)) {
        std::vector<Action> legal = legal_actions(state.board);
        Action a = agent_choose(agent, state.board, legal, rng);
        Board before = state.board;
        StepResult res = step(state, a, rng);
        if (record_transcript) {
            nlohmann::json rec = {
                {"game", game_index},
                {"move", state.moves},
                {"board", before.cells},
                {"action", action_name(a)},
                {"reward", res.reward},
                {"spawn_cell", res.spawn.cell},
                {"spawn_exponent", res.spawn.exponent}};
            tr << rec.dump() << '\n';
        }
        state = res.state;
    }
    run.result = {game_seed, max_tile(state.board), state.score, state.moves,
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count()};
    if (record_transcript) {
        nlohmann::json rec = {{"game", game_index},
                              {"final", true},
                              {"seed", game_seed},
                              {"max_tile", run.result.max_tile},
                              {"score", run.result.score},
                              {"moves", run.result.moves}};
        tr << rec.dump() << '\n';
        run.transcript = tr.str();
    }
    return run;
}

// n independent games; game g runs on the stream derive_stream(master_seed, g).
// With workers > 1 games are distributed over threads; results are identical
// to a sequential run because every game owns its seed.
inline std::vector<GameRun> run_games(const AgentSpec& agent, int n,
                                      uint64_t master_seed, int workers = 1,
                                      bool record_transcripts = false) {
    if (n < 1) throw std::invalid_argument("run_games: n must be >= 1");
    std::vector<GameRun> runs(n);
    auto work = [&](int begin, int stride) {
        for (int g = begin; g < n; g += stride)
            runs[g] = play_one_game(agent, derive_stream(master_seed, g), g,
                                    record_transcripts);
    };
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
        for (auto& t : pool) t.join();
    }
    return runs;
}

inline std::vector<GameResult> results_of(const std::vector<GameRun>& runs) {
    std::vector<GameResult> out;
    out.reserve(runs.size());
    for (const auto& r : runs) out.push_back(r.result);
    return out;
}

// --- distribution tables ----------------------------------------------------

struct DistributionTable {
    // max tile -> percentage of games, ascending tile order
    std::map<int, double> rows;
    int games = 0;
};

inline DistributionTable tile_distribution(const std::vector<GameResult>& results) {
    if (results.empty()) throw std::invalid_argument("tile_distribution: no results");
    DistributionTable t;
    t.games = static_cast<int>(results.size());
    std::map<int, int> counts;
    for (const auto& r : results) counts[r.max_tile] += 1;
    for (const auto& [tile, count] : counts)
        t.rows[tile] = 100.0 * count / t.games;
    return t;
}

inline std::string render_distribution(const DistributionTable& t,
                                       const std::string& label) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "Max Tile  " << label << "\n";
    for (const auto& [tile, pct] : t.rows)
        os << std::setw(8) << tile << "  " << std::setw(6) << pct << " %\n";
    return os.str();
}

// One row set, one percentage column per labelled result list.
inline std::string render_combined(
    const std::vector<std::pair<std::string, DistributionTable>>& columns) {
    std::map<int, std::vector<double>> rows;
    for (size_t i = 0; i < columns.size(); ++i)
        for (const auto& [tile, pct] : columns[i].second.rows) {
            auto& row = rows[tile];
            row.resize(columns.size(), 0.0);
            row[i] = pct;
        }
    for (auto& [tile, row] : rows) row.resize(columns.size(), 0.0);

    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << std::setw(8) << "Max Tile";
    for (const auto& [label, t] : columns) os << "  " << std::setw(12) << label;
    os << "\n";
    for (const auto& [tile, row] : rows) {
        os << std::setw(8) << tile;
        for (double pct : row) {
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(2) << pct << " %";
            os << "  " << std::setw(12) << cell.str();
        }
        os << "\n";
    }
    return os.str();
}

inline nlohmann::json distribution_json(const DistributionTable& t) {
    nlohmann::json rows = nlohmann::json::object();
    for (const auto& [tile, pct] : t.rows) rows[std::to_string(tile)] = pct;
    return {{"games", t.games}, {"percent_by_max_tile", rows}};
}

// --- transcript replay ------------------------------------------------------

// Re-simulates a JSONL transcript through the engine, checking every board,
// reward, and the final result. Throws on any mismatch.
inline void replay_transcript(std::istream& in) {
    std::string line;
    std::map<int, GameState> states;      // game -> current state
    std::map<int, Board> expected_next;   // game -> board implied by last move
    auto fail = [](const std::string& msg) {
        throw std::runtime_error("replay: " + msg);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line);
        int game = rec.at("game");
        if (rec.contains("final")) {
            auto it = states.find(game);
            if (it == states.end()) fail("final record before any move");
            const GameState& s = it->second;
            if (expected_next.count(game) && !(expected_next[game] == s.board))
                fail("tracked board diverged");
            if (rec.at("score") != s.score) fail("final score mismatch");
            if (rec.at("moves") != s.moves) fail("final move count mismatch");
            if (rec.at("max_tile") != max_tile(s.board)) fail("final max tile mismatch");
            if (!is_terminal(s.board)) fail("final board is not terminal");
            continue;
        }
        Board before;
        std::vector<uint8_t> cells = rec.at("board");
        if (cells.size() != 16) fail("bad board record");
        std::copy(cells.begin(), cells.end(), before.cells.begin());
        if (expected_next.count(game) && !(expected_next[game] == before))
            fail("recorded board does not match replayed board");

        Action action = Action::Left;
        bool found = false;
        for (Action a : kAllActions)
            if (rec.at("action") == action_name(a)) { action = a; found = true; }
        if (!found) fail("unknown action name");

        MoveOutcome mo = apply_move(before, action);
        if (!mo.changed) fail("recorded action is illegal");
        if (mo.reward != rec.at("reward").get<int>()) fail("reward mismatch");
        int cell = rec.at("spawn_cell");
        int exponent = rec.at("spawn_exponent");
        if (cell < 0 || cell >= 16 || mo.board.cells[cell] != 0)
            fail("spawn cell is not empty");
        if (exponent != 1 && exponent != 2) fail("bad spawn exponent");
        mo.board.cells[cell] = static_cast<uint8_t>(exponent);

        GameState& s = states[game];
        if (s.moves == 0 && !expected_next.count(game)) s.board = before;
        s.board = mo.board;
        s.score += mo.reward;
        s.moves += 1;
        expected_next[game] = mo.board;
    }
}

} // namespace q48
