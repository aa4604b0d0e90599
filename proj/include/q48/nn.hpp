#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "q48/rng.hpp"

namespace q48 {

struct LinearLayer {
    int in = 0;
    int out = 0;
    std::vector<double> weights;  // out x in, row-major
    std::vector<double> bias;     // out

    LinearLayer() = default;
    LinearLayer(int in_, int out_)
        : in(in_), out(out_), weights(static_cast<size_t>(in_) * out_, 0.0),
          bias(out_, 0.0) {}
};

// Model: 256 -> 128 linear, ReLU, dropout, 128 -> 4 linear. The 4 outputs
// are the Q-values of the 4 move directions.
struct QNetwork {
    LinearLayer layer1{256, 128};
    LinearLayer layer2{128, 4};
    double dropout_rate = 0.2;
};

enum class Mode { Train, Eval };

struct ForwardCache {
    std::array<double, 256> input;
    std::vector<double> pre_act;   // layer1 output before ReLU
    std::vector<double> hidden;    // after ReLU, dropout applied in Train mode
    std::vector<uint8_t> mask;     // dropout keep mask (Train mode only)
    Mode mode = Mode::Eval;
};

// Weights uniform in [-sqrt(6/fan_in), +sqrt(6/fan_in)], biases zero.
inline QNetwork init_network(Rng& rng, double dropout_rate = 0.2) {
    QNetwork net;
    net.dropout_rate = dropout_rate;
    for (LinearLayer* l : {&net.layer1, &net.layer2}) {
        double bound = std::sqrt(6.0 / l->in);
        for (double& w : l->weights) w = (rng.next_double() * 2.0 - 1.0) * bound;
    }
    return net;
}

// Train mode uses inverted dropout: kept units are divided by (1 - rate) so
// Eval mode needs no rescaling.
inline std::pair<std::array<double, 4>, ForwardCache>
forward(const QNetwork& net, std::span<const double> input, Mode mode, Rng& rng) {
    if (static_cast<int>(input.size()) != net.layer1.in)
        throw std::invalid_argument("forward: input size mismatch");

    ForwardCache cache;
    cache.mode = mode;
    std::copy(input.begin(), input.end(), cache.input.begin());

    const int hidden = net.layer1.out;
    cache.pre_act.resize(hidden);
    for (int j = 0; j < hidden; ++j) {
        double acc = net.layer1.bias[j];
        const double* wrow = &net.layer1.weights[static_cast<size_t>(j) * net.layer1.in];
        for (int i = 0; i < net.layer1.in; ++i) acc += wrow[i] * input[i];
        cache.pre_act[j] = acc;
    }

    cache.hidden.resize(hidden);
    if (mode == Mode::Train && net.dropout_rate > 0.0) {
        cache.mask.resize(hidden);
        double keep = 1.0 - net.dropout_rate;
        for (int j = 0; j < hidden; ++j) {
            cache.mask[j] = rng.next_double() < keep ? 1 : 0;
            double h = cache.pre_act[j] > 0.0 ? cache.pre_act[j] : 0.0;
            cache.hidden[j] = cache.mask[j] ? h / keep : 0.0;
        }
    } else {
        for (int j = 0; j < hidden; ++j)
            cache.hidden[j] = cache.pre_act[j] > 0.0 ? cache.pre_act[j] : 0.0;
    }

    std::array<double, 4> q{};
    for (int k = 0; k < net.layer2.out; ++k) {
        double acc = net.layer2.bias[k];
        const double* wrow = &net.layer2.weights[static_cast<size_t>(k) * net.layer2.in];
        for (int j = 0; j < hidden; ++j) acc += wrow[j] * cache.hidden[j];
        q[k] = acc;
    }
    return {q, std::move(cache)};
}

struct Gradients {
    std::vector<double> w1, b1, w2, b2;

    explicit Gradients(const QNetwork& net)
        : w1(net.layer1.weights.size(), 0.0), b1(net.layer1.bias.size(), 0.0),
          w2(net.layer2.weights.size(), 0.0), b2(net.layer2.bias.size(), 0.0) {}

    void add(const Gradients& other) {
        for (size_t i = 0; i < w1.size(); ++i) w1[i] += other.w1[i];
        for (size_t i = 0; i < b1.size(); ++i) b1[i] += other.b1[i];
        for (size_t i = 0; i < w2.size(); ++i) w2[i] += other.w2[i];
        for (size_t i = 0; i < b2.size(); ++i) b2[i] += other.b2[i];
    }
};

// Exact reverse-mode gradients of q . grad_q, respecting the stored dropout
// mask and ReLU gate.
inline Gradients backward(const QNetwork& net, const ForwardCache& cache,
                          const std::array<double, 4>& grad_q) {
    if (cache.mode != Mode::Train)
        throw std::invalid_argument("backward: cache is not from a Train-mode forward");

    Gradients g(net);
    const int hidden = net.layer1.out;
    std::vector<double> grad_hidden(hidden, 0.0);

    for (int k = 0; k < net.layer2.out; ++k) {
        double gk = grad_q[k];
        g.b2[k] = gk;
        double* gw = &g.w2[static_cast<size_t>(k) * hidden];
        const double* w = &net.layer2.weights[static_cast<size_t>(k) * hidden];
        for (int j = 0; j < hidden; ++j) {
            gw[j] = gk * cache.hidden[j];
            grad_hidden[j] += gk * w[j];
        }
    }

    double keep = 1.0 - net.dropout_rate;
    for (int j = 0; j < hidden; ++j) {
        double gh = grad_hidden[j];
        if (!cache.mask.empty()) gh = cache.mask[j] ? gh / keep : 0.0;
        if (cache.pre_act[j] <= 0.0) gh = 0.0;
        if (gh == 0.0) continue;
        g.b1[j] = gh;
        double* gw = &g.w1[static_cast<size_t>(j) * net.layer1.in];
        for (int i = 0; i < net.layer1.in; ++i) gw[i] = gh * cache.input[i];
    }
    return g;
}

// loss = (target - q_sa)^2, gradient w.r.t. q_sa.
inline std::pair<double, double> mse_td_loss(double q_sa, double target) {
    double diff = target - q_sa;
    return {diff * diff, -2.0 * diff};
}

// Adam state: first/second moment per parameter plus the step counter.
struct OptimizerState {
    Gradients m, v;
    long step = 0;

    explicit OptimizerState(const QNetwork& net) : m(net), v(net) {}
};

inline void optimizer_step(QNetwork& net, OptimizerState& opt,
                           const Gradients& grads, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    opt.step += 1;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(opt.step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(opt.step));
    auto update = [&](std::vector<double>& param, std::vector<double>& m,
                      std::vector<double>& v, const std::vector<double>& g) {
        for (size_t i = 0; i < param.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            param[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    };
    update(net.layer1.weights, opt.m.w1, opt.v.w1, grads.w1);
    update(net.layer1.bias, opt.m.b1, opt.v.b1, grads.b1);
    update(net.layer2.weights, opt.m.w2, opt.v.w2, grads.w2);
    update(net.layer2.bias, opt.m.b2, opt.v.b2, grads.b2);
}

// --- serialization ----------------------------------------------------------
//
// Line-oriented text: header `Q48-MODEL v1 in=256 hidden=128 out=4
// dropout=<rate>`, then the four parameter blocks, one matrix row per line.

inline void save_network(const QNetwork& net, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save: cannot open " + path);
    f << std::setprecision(17);
    f << "Q48-MODEL v1 in=" << net.layer1.in << " hidden=" << net.layer1.out
      << " out=" << net.layer2.out << " dropout=" << net.dropout_rate << "\n";
    auto write_block = [&](const std::string& name, const std::vector<double>& vals,
                           int cols) {
        f << name << "\n";
        for (size_t i = 0; i < vals.size(); ++i) {
            f << vals[i];
            f << (((i + 1) % cols == 0) ? '\n' : ' ');
        }
    };
    write_block("layer1.weights", net.layer1.weights, net.layer1.in);
    write_block("layer1.bias", net.layer1.bias, net.layer1.out);
    write_block("layer2.weights", net.layer2.weights, net.layer2.in);
    write_block("layer2.bias", net.layer2.bias, net.layer2.out);
    if (!f) throw std::runtime_error("save: write failed for " + path);
}

inline QNetwork load_network(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load: cannot open " + path);
    std::string magic, version;
    int in = 0, hidden = 0, out = 0;
    double dropout = 0.0;
    std::string tok;
    f >> magic >> version;
    if (magic != "Q48-MODEL" || version != "v1")
        throw std::runtime_error("load: bad model header in " + path);
    while (f >> tok && tok.find('=') != std::string::npos) {
        auto pos = tok.find('=');
        std::string key = tok.substr(0, pos), val = tok.substr(pos + 1);
        if (key == "in") in = std::stoi(val);
        else if (key == "hidden") hidden = std::stoi(val);
        else if (key == "out") out = std::stoi(val);
        else if (key == "dropout") dropout = std::stod(val);
        if (key == "dropout") break;
    }
    if (in != 256 || hidden != 128 || out != 4)
        throw std::runtime_error("load: unsupported architecture in " + path);

    QNetwork net;
    net.dropout_rate = dropout;
    auto read_block = [&](const std::string& name, std::vector<double>& vals) {
        std::string label;
        if (!(f >> label) || label != name)
            throw std::runtime_error("load: expected block '" + name + "' in " + path);
        for (double& v : vals)
            if (!(f >> v)) throw std::runtime_error("load: truncated block '" + name +
                                                    "' in " + path);
    };
    read_block("layer1.weights", net.layer1.weights);
    read_block("layer1.bias", net.layer1.bias);
    read_block("layer2.weights", net.layer2.weights);
    read_block("layer2.bias", net.layer2.bias);
    return net;
}

} // namespace q48
