#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "q48/harness.hpp"

namespace {

using namespace q48;

AgentSpec build_agent(const std::string& kind, const Config& cfg,
                      const std::string& model_path) {
    if (kind == "random") return make_random_agent();
    if (kind == "beam")
        return make_beam_agent(cfg.beam_config(), cfg.heuristic_weights());
    if (kind == "dqn") {
        if (model_path.empty())
            throw std::runtime_error("agent 'dqn' requires --model");
        return make_dqn_agent(load_network(model_path));
    }
    throw std::runtime_error("unknown agent kind '" + kind + "'");
}

void write_transcripts(const std::vector<GameRun>& runs, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open transcript file " + path);
    for (const auto& r : runs) f << r.transcript;
}

void print_results(const std::vector<GameResult>& results, const std::string& label) {
    DistributionTable dist = tile_distribution(results);
    std::cout << render_distribution(dist, label);
    long long total_score = 0;
    double mean_tile = 0;
    for (const auto& r : results) {
        total_score += r.score;
        mean_tile += r.max_tile;
    }
    std::cout << "games: " << results.size()
              << "  mean score: " << std::fixed << std::setprecision(2)
              << static_cast<double>(total_score) / results.size()
              << "  mean max tile: " << mean_tile / results.size() << "\n";
}

int cmd_play(const std::string& agent_kind, int games, uint64_t seed,
             const std::string& config_path, const std::string& model_path,
             const std::string& transcript_path, int workers) {
    Config cfg;
    if (!config_path.empty()) cfg = Config::from_file(config_path);
    AgentSpec agent = build_agent(agent_kind, cfg, model_path);
    auto runs = run_games(agent, games, seed, workers, !transcript_path.empty());
    if (!transcript_path.empty()) write_transcripts(runs, transcript_path);
    print_results(results_of(runs), agent_kind);
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_path,
              const std::string& log_path, uint64_t seed) {
    Config cfg;
    if (!config_path.empty()) cfg = Config::from_file(config_path);
    TrainConfig tc = cfg.train_config();
    tc.seed = seed;
    std::cerr << "training: " << tc.games << " games, epsilon " << tc.epsilon
              << ", batch " << tc.batch_size << ", gamma " << tc.gamma
              << ", lr " << tc.lr << ", dropout " << tc.dropout_rate << "\n";
    TrainOutput out = train(tc);
    save_network(out.net, out_path);
    if (!log_path.empty()) {
        std::ofstream f(log_path);
        if (!f) throw std::runtime_error("cannot open log file " + log_path);
        for (const auto& e : out.log) {
            nlohmann::json rec = {{"game", e.game},     {"score", e.score},
                                  {"max_tile", e.max_tile}, {"moves", e.moves},
                                  {"mean_loss", e.mean_loss}};
            f << rec.dump() << '\n';
        }
    }
    std::cerr << "model written to " << out_path << "\n";
    return 0;
}

int cmd_eval(const std::string& model_path, int games, uint64_t seed) {
    QNetwork net = load_network(model_path);
    auto results = evaluate(net, games, seed);
    print_results(results, "dqn");
    return 0;
}

int cmd_bench(int games, uint64_t seed, const std::string& config_path,
              const std::string& model_path, const std::string& transcript_path,
              int workers) {
    Config cfg;
    if (!config_path.empty()) cfg = Config::from_file(config_path);

    // Without a model file, the DQN column uses a freshly initialized
    // (untrained) network seeded from the master seed, so the table is
    // still deterministic.
    QNetwork net;
    if (!model_path.empty()) {
        net = load_network(model_path);
    } else {
        Rng rng(derive_stream(seed, 0xfeedbeefULL));
        net = init_network(rng, cfg.get_double("dqn.dropout_rate", 0.2));
    }

    std::vector<std::pair<std::string, DistributionTable>> columns;
    std::ofstream tf;
    if (!transcript_path.empty()) {
        tf.open(transcript_path);
        if (!tf) throw std::runtime_error("cannot open transcript file " +
                                          transcript_path);
    }
    std::vector<std::pair<std::string, AgentSpec>> agents;
    agents.emplace_back("random", make_random_agent());
    agents.emplace_back("dqn", make_dqn_agent(net));
    agents.emplace_back("beam",
                        make_beam_agent(cfg.beam_config(), cfg.heuristic_weights()));
    for (const auto& [label, agent] : agents) {
        auto runs = run_games(agent, games, seed, workers, tf.is_open());
        for (const auto& r : runs) tf << r.transcript;
        columns.emplace_back(label, tile_distribution(results_of(runs)));
    }
    std::cout << render_combined(columns);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2048 agents: seeded game batches, DQN training, benchmarks"};
    app.require_subcommand(1);

    std::string agent_kind = "random", config_path, model_path, transcript_path;
    std::string out_path, log_path;
    int games = 100, workers = 1;
    uint64_t seed = 0;

    auto* play = app.add_subcommand("play", "run games with one agent");
    play->add_option("--agent", agent_kind, "random|beam|dqn")->required();
    play->add_option("--games", games)->required();
    play->add_option("--seed", seed)->required();
    play->add_option("--config", config_path);
    play->add_option("--model", model_path);
    play->add_option("--transcripts", transcript_path);
    play->add_option("--workers", workers);

    auto* tr = app.add_subcommand("train", "train the DQN agent");
    tr->add_option("--config", config_path);
    tr->add_option("--out", out_path)->required();
    tr->add_option("--log", log_path);
    tr->add_option("--seed", seed);

    auto* ev = app.add_subcommand("eval", "evaluate a trained model");
    ev->add_option("--model", model_path)->required();
    ev->add_option("--games", games)->required();
    ev->add_option("--seed", seed)->required();

    auto* bench = app.add_subcommand("bench", "run all three agents");
    bench->add_option("--games", games)->required();
    bench->add_option("--seed", seed)->required();
    bench->add_option("--config", config_path);
    bench->add_option("--model", model_path);
    bench->add_option("--transcripts", transcript_path);
    bench->add_option("--workers", workers);

    CLI11_PARSE(app, argc, argv);

    try {
        if (play->parsed())
            return cmd_play(agent_kind, games, seed, config_path, model_path,
                            transcript_path, workers);
        if (tr->parsed()) return cmd_train(config_path, out_path, log_path, seed);
        if (ev->parsed()) return cmd_eval(model_path, games, seed);
        if (bench->parsed())
            return cmd_bench(games, seed, config_path, model_path,
                             transcript_path, workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
