// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Budgets are generous; times are printed for reference.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "q48/harness.hpp"
#include "reference.hpp"

using namespace q48;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
public:
    Criterion(int id, std::string desc)
        : id_(id), desc_(std::move(desc)),
          start_(std::chrono::steady_clock::now()) {}

    void record(bool ok, const std::string& detail = "") {
        double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start_).count();
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << id_ << ": "
                  << desc_;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "  [" << std::fixed << std::setprecision(1) << secs << "s]"
                  << std::endl;
        if (!ok) ++g_failures;
    }

private:
    int id_;
    std::string desc_;
    std::chrono::steady_clock::time_point start_;
};

double percent_at(const DistributionTable& t, int tile) {
    auto it = t.rows.find(tile);
    return it == t.rows.end() ? 0.0 : it->second;
}

double percent_at_least(const std::vector<GameResult>& results, int tile) {
    int n = 0;
    for (const auto& r : results) n += r.max_tile >= tile ? 1 : 0;
    return 100.0 * n / results.size();
}

double mean_max_tile(const std::vector<GameResult>& results) {
    double sum = 0;
    for (const auto& r : results) sum += r.max_tile;
    return sum / results.size();
}

void criterion_1_row_oracle() {
    Criterion c(1, "slide_and_merge_row equals naive reference on all 65536 rows");
    bool ok = true;
    for (uint32_t packed = 0; packed < 65536 && ok; ++packed) {
        Row row = {static_cast<uint8_t>(packed & 0xF),
                   static_cast<uint8_t>((packed >> 4) & 0xF),
                   static_cast<uint8_t>((packed >> 8) & 0xF),
                   static_cast<uint8_t>((packed >> 12) & 0xF)};
        auto got = slide_and_merge_row(row);
        auto want = ref::naive_slide(row);
        ok = got.row == want.row && got.reward == want.reward;
    }
    c.record(ok);
}

void criterion_2_random_baseline() {
    Criterion c(2, "random baseline max-tile distribution over 1000 games");
    auto results = results_of(run_games(make_random_agent(), 1000, 2024));
    auto dist = tile_distribution(results);
    double p64 = percent_at(dist, 64);
    double p128 = percent_at(dist, 128);
    double p256 = percent_at(dist, 256);
    double p512up = percent_at_least(results, 512);
    double p1024up = percent_at_least(results, 1024);
    bool ok = std::abs(p128 - 48.5) <= 5.0 && std::abs(p64 - 36.9) <= 5.0 &&
              std::abs(p256 - 7.1) <= 3.0 && p512up <= 1.0 && p1024up == 0.0;
    std::ostringstream d;
    d << std::fixed << std::setprecision(1) << "64:" << p64 << "% 128:" << p128
      << "% 256:" << p256 << "% >=512:" << p512up << "%";
    c.record(ok, d.str());
}

void criterion_3_spawn_distribution() {
    Criterion c(3, "spawn: 10% four-tiles and uniform placement over 100000 draws");
    const int trials = 100000;
    Rng rng(909);
    int fours = 0;
    std::array<int, 16> counts{};
    for (int i = 0; i < trials; ++i) {
        Board b;  // fixed board: all 16 cells empty
        auto info = spawn_tile(b, rng);
        fours += info.exponent == 2 ? 1 : 0;
        counts[info.cell] += 1;
    }
    double frac = static_cast<double>(fours) / trials;
    double expect = trials / 16.0;
    double chi2 = 0;
    for (int count : counts) {
        double d = count - expect;
        chi2 += d * d / expect;
    }
    // chi-square critical value, df = 15, upper tail 0.001
    const double crit = 37.697;
    bool ok = frac >= 0.094 && frac <= 0.106 && chi2 < crit;
    std::ostringstream d;
    d << std::fixed << std::setprecision(4) << "four-frac:" << frac
      << " chi2:" << std::setprecision(2) << chi2 << " < " << crit;
    c.record(ok, d.str());
}

void criterion_4_beam_strength() {
    Criterion c(4, "beam search (d=20, k=10): >=50% at 1024, 2048 reached, "
                   "beats random on the same seeds");
    const int games = 100;
    const uint64_t seed = 4242;
    int workers = std::max(1u, std::thread::hardware_concurrency());
    auto beam = results_of(run_games(make_beam_agent(), games, seed, workers));
    auto random = results_of(run_games(make_random_agent(), games, seed));
    double p1024 = percent_at_least(beam, 1024);
    bool reached_2048 = percent_at_least(beam, 2048) > 0.0;
    double beam_mean = mean_max_tile(beam);
    double random_mean = mean_max_tile(random);
    bool ok = p1024 >= 50.0 && reached_2048 && beam_mean > random_mean;
    std::ostringstream d;
    d << std::fixed << std::setprecision(1) << ">=1024:" << p1024
      << "% 2048-reached:" << (reached_2048 ? "yes" : "no")
      << " mean:" << beam_mean << " vs random:" << random_mean;
    c.record(ok, d.str());
}

void criterion_5_dqn_learning() {
    Criterion c(5, "DQN (1000 games, eps=0.3, batch 128): >=30% at 256 after "
                   "training, beats random");
    TrainConfig cfg;
    cfg.seed = 515;
    TrainOutput out = train(cfg);
    const int eval_games = 200;
    const uint64_t eval_seed = 616;
    auto trained = evaluate(out.net, eval_games, eval_seed);
    auto random = results_of(run_games(make_random_agent(), eval_games, eval_seed));
    double p256 = percent_at_least(trained, 256);
    double dqn_mean = mean_max_tile(trained);
    double random_mean = mean_max_tile(random);
    bool ok = p256 >= 30.0 && dqn_mean > random_mean;
    std::ostringstream d;
    d << std::fixed << std::setprecision(1) << ">=256:" << p256
      << "% mean:" << dqn_mean << " vs random:" << random_mean;
    c.record(ok, d.str());
}

void criterion_6_gradient_check() {
    Criterion c(6, "backward vs central differences, 400 parameters, rel err < 1e-4");
    Rng rng(606);
    const double h = 1e-5;
    double worst = 0;
    int checked = 0;
    for (int net_i = 0; net_i < 20; ++net_i) {
        QNetwork net = init_network(rng, 0.0);
        Encoding x{};
        for (double& v : x) v = rng.bernoulli(0.2) ? 1.0 : 0.0;
        std::array<double, 4> grad_q;
        for (double& g : grad_q) g = rng.next_double() * 2 - 1;
        Rng fwd_rng(0);
        auto [q0, cache] = forward(net, x, Mode::Train, fwd_rng);
        Gradients g = backward(net, cache, grad_q);

        auto probe = [&](std::vector<double>& params, const std::vector<double>& grads) {
            for (int s = 0; s < 5; ++s) {
                size_t i = rng.uniform_int(static_cast<uint32_t>(params.size()));
                double saved = params[i];
                auto eval = [&](double v) {
                    params[i] = v;
                    Rng r(0);
                    auto [q, cc] = forward(net, x, Mode::Eval, r);
                    double f = 0;
                    for (int k = 0; k < 4; ++k) f += q[k] * grad_q[k];
                    return f;
                };
                double numeric = (eval(saved + h) - eval(saved - h)) / (2 * h);
                params[i] = saved;
                double denom = std::max({std::abs(numeric), std::abs(grads[i]), 1e-8});
                worst = std::max(worst, std::abs(numeric - grads[i]) / denom);
                ++checked;
            }
        };
        probe(net.layer1.weights, g.w1);
        probe(net.layer1.bias, g.b1);
        probe(net.layer2.weights, g.w2);
        probe(net.layer2.bias, g.b2);
    }
    std::ostringstream d;
    d << checked << " params, max rel err " << std::scientific
      << std::setprecision(2) << worst;
    c.record(checked >= 200 && worst < 1e-4, d.str());
}

void criterion_7_invariants() {
    Criterion c(7, "conservation, D4 equivariance/invariance, legal masking, "
                   "transcript replay");
    bool ok = true;
    std::string what;

    Rng rng(707);
    for (int i = 0; i < 100000 && ok; ++i) {
        Board b = ref::random_board(rng, rng.next_double());
        Action a = static_cast<Action>(rng.uniform_int(4));
        if (ref::tile_value_sum(apply_move(b, a).board) != ref::tile_value_sum(b)) {
            ok = false;
            what = "tile-sum conservation";
        }
    }
    HeuristicWeights w;
    for (int i = 0; i < 10000 && ok; ++i) {
        Board b = ref::random_board(rng, rng.next_double());
        int sym = static_cast<int>(rng.uniform_int(8));
        Action a = static_cast<Action>(rng.uniform_int(4));
        auto direct = apply_move(b, a);
        auto mapped = apply_move(transform(b, sym), act_transform(a, sym));
        if (!(mapped.board == transform(direct.board, sym)) ||
            mapped.reward != direct.reward) {
            ok = false;
            what = "D4 equivariance of apply_move";
        }
        Board t = transform(b, sym);
        if (count_empty(t) != count_empty(b) || max_exponent(t) != max_exponent(b) ||
            smoothness(t) != smoothness(b) || monotonicity(t) != monotonicity(b)) {
            ok = false;
            what = "D4 invariance of heuristic factors";
        }
    }
    QNetwork net = init_network(rng, 0.0);
    for (int i = 0; i < 100000 && ok; ++i) {
        if (i % 10000 == 0) net = init_network(rng, 0.0);
        Board b = ref::random_board(rng, 0.6);
        auto legal = legal_actions(b);
        if (legal.empty()) continue;
        double eps = rng.next_double();
        Action a = select_action(net, encode_onehot(b), legal, eps, rng);
        if (!apply_move(b, a).changed) {
            ok = false;
            what = "masked action selection legality";
        }
    }
    if (ok) {
        auto runs = run_games(make_random_agent(), 100, 808, 1, true);
        std::string all;
        for (const auto& r : runs) all += r.transcript;
        std::istringstream in(all);
        try {
            replay_transcript(in);
        } catch (const std::exception& e) {
            ok = false;
            what = std::string("transcript replay: ") + e.what();
        }
    }
    c.record(ok, ok ? "" : what);
}

bool read_file(const fs::path& p, std::string& out) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return false;
    std::ostringstream ss;
    ss << f.rdbuf();
    out = ss.str();
    return true;
}

void criterion_8_determinism(const std::string& cli_path) {
    Criterion c(8, "bench --games 50 --seed 1: repeated and 4-worker runs are "
                   "byte-identical");
    fs::path dir = fs::temp_directory_path() / "q48_acceptance";
    fs::create_directories(dir);
    auto run = [&](const std::string& tag, const std::string& extra) {
        fs::path out = dir / (tag + ".out");
        fs::path tr = dir / (tag + ".jsonl");
        std::string cmd = cli_path + " bench --games 50 --seed 1 --transcripts " +
                          tr.string() + extra + " > " + out.string();
        return std::system(cmd.c_str()) == 0;
    };
    bool ok = run("a", "") && run("b", "") && run("c", " --workers 4");
    std::string oa, ob, oc, ta, tb, tc;
    ok = ok && read_file(dir / "a.out", oa) && read_file(dir / "b.out", ob) &&
         read_file(dir / "c.out", oc) && read_file(dir / "a.jsonl", ta) &&
         read_file(dir / "b.jsonl", tb) && read_file(dir / "c.jsonl", tc);
    ok = ok && oa == ob && oa == oc && ta == tb && ta == tc && !oa.empty() &&
         !ta.empty();
    c.record(ok);
    fs::remove_all(dir);
}

} // namespace

int main(int argc, char** argv) {
    std::string cli_path = Q48_CLI_PATH;
    if (argc > 1) cli_path = argv[1];

    criterion_1_row_oracle();
    criterion_2_random_baseline();
    criterion_3_spawn_distribution();
    criterion_6_gradient_check();
    criterion_7_invariants();
    criterion_8_determinism(cli_path);
    criterion_4_beam_strength();
    criterion_5_dqn_learning();

    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                  : std::to_string(g_failures) + " CRITERIA FAILED")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
