// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "taxiverify/dataset.hpp"
#include "taxiverify/network.hpp"

namespace taxiverify {

struct TrainConfig {
    std::vector<std::size_t> hidden{64, 64};
    double learning_rate = 0.05;
    double momentum = 0.9;
    std::size_t batch_size = 64;
    std::size_t epochs = 100;
    std::uint64_t seed = 1;
};

struct TrainResult {
    Network net;
    Vec loss_trace;  // initial loss followed by one mean loss per epoch
};

struct TrainingDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// ReLU MLP with the given hidden widths, identity output layer, and uniform
/// init in [-r, r] with r = sqrt(6 / (fan_in + fan_out)).
inline Network init_mlp(std::size_t in_dim, const std::vector<std::size_t>& hidden,
                        std::size_t out_dim, Rng& rng) {
    Network net;
    std::vector<std::size_t> dims{in_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(out_dim);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.weights = Mat(dims[l + 1], dims[l]);
        const double r = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        for (double& w : layer.weights.data) w = rng.uniform(-r, r);
        layer.bias = Vec(dims[l + 1], 0.0);
        layer.activation = l + 2 == dims.size() ? Activation::Identity : Activation::ReLU;
        net.layers.push_back(std::move(layer));
    }
    net.validate();
    return net;
}

struct GradBuffer {
    std::vector<Mat> dw;
    std::vector<Vec> db;

    explicit GradBuffer(const Network& net) {
        for (const auto& l : net.layers) {
            dw.emplace_back(l.weights.rows, l.weights.cols);
            db.emplace_back(l.bias.size(), 0.0);
        }
    }
    void zero() {
        for (auto& m : dw) std::fill(m.data.begin(), m.data.end(), 0.0);
        for (auto& v : db) std::fill(v.begin(), v.end(), 0.0);
    }
};

/// MSE (mean over samples and output coordinates) and its analytic gradient
/// over the given sample indices, accumulated into `grad`.
inline double loss_and_gradient(const Network& net, const std::vector<Vec>& inputs,
                                const std::vector<Vec>& targets, std::span<const std::size_t> batch,
                                GradBuffer& grad) {
    grad.zero();
    const std::size_t n_layers = net.layers.size();
    const double out_dim = static_cast<double>(net.output_dim());
    const double scale = 1.0 / (static_cast<double>(batch.size()) * out_dim);
    double loss = 0.0;

    std::vector<Vec> act(n_layers + 1);   // post-activation values, act[0] = input
    std::vector<Vec> delta(n_layers);     // dL/d(pre-activation)
    for (const std::size_t idx : batch) {
        act[0] = inputs[idx];
        for (std::size_t l = 0; l < n_layers; ++l) {
            const auto& layer = net.layers[l];
            Vec z = matvec(layer.weights, act[l]);
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.bias[i];
            if (layer.activation == Activation::ReLU)
                for (double& zi : z) zi = zi > 0.0 ? zi : 0.0;
            act[l + 1] = std::move(z);
        }
        const Vec& y = act[n_layers];
        const Vec& t = targets[idx];
        Vec d(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double e = y[i] - t[i];
            loss += e * e * scale;
            d[i] = 2.0 * e * scale;
        }
        delta[n_layers - 1] = std::move(d);
        for (std::size_t l = n_layers; l-- > 0;) {
            const auto& layer = net.layers[l];
            Vec& dl = delta[l];
            // ReLU derivative masks where the post-activation is zero.
            if (layer.activation == Activation::ReLU)
                for (std::size_t i = 0; i < dl.size(); ++i)
                    if (act[l + 1][i] <= 0.0) dl[i] = 0.0;
            Mat& dw = grad.dw[l];
            const Vec& a = act[l];
            for (std::size_t i = 0; i < dw.rows; ++i) {
                const double di = dl[i];
                if (di == 0.0) continue;
                double* row = dw.data.data() + i * dw.cols;
                for (std::size_t j = 0; j < dw.cols; ++j) row[j] += di * a[j];
                grad.db[l][i] += di;
            }
            if (l > 0) {
                Vec prev(layer.in_dim(), 0.0);
                for (std::size_t i = 0; i < layer.out_dim(); ++i) {
                    const double di = dl[i];
                    if (di == 0.0) continue;
                    const double* row = layer.weights.data.data() + i * layer.weights.cols;
                    for (std::size_t j = 0; j < prev.size(); ++j) prev[j] += di * row[j];
                }
                delta[l - 1] = std::move(prev);
            }
        }
    }
    return loss;
}

inline double mse_loss(const Network& net, const std::vector<Vec>& inputs,
                       const std::vector<Vec>& targets) {
    double loss = 0.0;
    const double scale = 1.0 / (static_cast<double>(inputs.size()) * static_cast<double>(net.output_dim()));
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Vec y = evaluate(net, inputs[i]);
        for (std::size_t k = 0; k < y.size(); ++k) {
            const double e = y[k] - targets[i][k];
            loss += e * e * scale;
        }
    }
    return loss;
}

/// Minibatch SGD with momentum on MSE. Deterministic for a fixed seed: fixed
/// shuffle order, samples accumulated in index order, single-threaded.
inline TrainResult train_mlp(const std::vector<Vec>& inputs, const std::vector<Vec>& targets,
                             std::size_t out_dim, const TrainConfig& cfg) {
    if (inputs.empty() || inputs.size() != targets.size())
        throw std::invalid_argument("train_mlp: empty or mismatched dataset");
    Rng rng(cfg.seed);
    TrainResult res;
    res.net = init_mlp(inputs[0].size(), cfg.hidden, out_dim, rng);
    res.loss_trace.push_back(mse_loss(res.net, inputs, targets));

    GradBuffer grad(res.net);
    std::vector<Mat> vel_w;
    std::vector<Vec> vel_b;
    for (const auto& l : res.net.layers) {
        vel_w.emplace_back(l.weights.rows, l.weights.cols);
        vel_b.emplace_back(l.bias.size(), 0.0);
    }

    const std::size_t n = inputs.size();
    const std::size_t bs = std::min(cfg.batch_size == 0 ? n : cfg.batch_size, n);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = rng.permutation(n);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += bs) {
            const std::size_t len = std::min(bs, n - start);
            const double loss = loss_and_gradient(res.net, inputs, targets,
                                                  {order.data() + start, len}, grad);
            if (!std::isfinite(loss))
                throw TrainingDiverged("train_mlp: loss diverged at epoch " + std::to_string(epoch));
            epoch_loss += loss;
            ++batches;
            for (std::size_t l = 0; l < res.net.layers.size(); ++l) {
                auto& layer = res.net.layers[l];
                for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
                    vel_w[l].data[i] = cfg.momentum * vel_w[l].data[i] - cfg.learning_rate * grad.dw[l].data[i];
                    layer.weights.data[i] += vel_w[l].data[i];
                }
                for (std::size_t i = 0; i < layer.bias.size(); ++i) {
                    vel_b[l][i] = cfg.momentum * vel_b[l][i] - cfg.learning_rate * grad.db[l][i];
                    layer.bias[i] += vel_b[l][i];
                }
            }
        }
        res.loss_trace.push_back(epoch_loss / static_cast<double>(batches));
    }
    return res;
}

// State normalization used for the generator input: p/11, theta/30 map the
// state domain onto [-1, 1] to balance branch-and-bound split scales against
// the latent dims. The scaling is folded into the exported first layer, so the
// published network takes raw (p, theta, z1, z2).
inline constexpr double kPScale = 11.0;
inline constexpr double kThetaScale = 30.0;

inline Network fold_input_scaling(Network net, const Vec& scales) {
    auto& w = net.layers.front().weights;
    check_dim(scales.size(), w.cols, "fold_input_scaling");
    for (std::size_t i = 0; i < w.rows; ++i)
        for (std::size_t j = 0; j < w.cols; ++j) w(i, j) /= scales[j];
    return net;
}

inline Network fold_output_scaling(Network net, const Vec& scales) {
    auto& last = net.layers.back();
    check_dim(scales.size(), last.out_dim(), "fold_output_scaling");
    for (std::size_t i = 0; i < last.out_dim(); ++i) {
        for (std::size_t j = 0; j < last.in_dim(); ++j) last.weights(i, j) *= scales[i];
        last.bias[i] *= scales[i];
    }
    return net;
}

/// Trains the image generator (p, theta, z1, z2) -> 128 pixels on rendered
/// records; returns the network in raw input units with its valid input box.
inline TrainResult train_generator(const Dataset& ds, const TrainConfig& cfg) {
    std::vector<Vec> x, y;
    x.reserve(ds.size());
    y.reserve(ds.size());
    for (const auto& rec : ds.records) {
        x.push_back({rec.p / kPScale, rec.theta / kThetaScale, rec.z1, rec.z2});
        y.push_back(rec.image);
    }
    TrainResult res = train_mlp(x, y, kImagePixels, cfg);
    res.net = fold_input_scaling(std::move(res.net), {kPScale, kThetaScale, 1.0, 1.0});
    res.net.input_names = {"p", "theta", "z1", "z2"};
    res.net.input_lo = Vec{-kPScale, -kThetaScale, -1.0, -1.0};
    res.net.input_hi = Vec{kPScale, kThetaScale, 1.0, 1.0};
    res.net.validate();
    return res;
}

/// Trains the state-estimating controller head, 128 pixels -> (p_hat, theta_hat).
/// Targets are normalized during training so both outputs carry comparable
/// gradient scales; the scaling is folded back into the last layer, so the
/// returned network predicts raw units. When a generator is supplied, each
/// record also contributes the generator's reconstruction of its observation,
/// so the controller stays accurate on both image sources.
inline TrainResult train_controller(const Dataset& ds, const TrainConfig& cfg,
                                    const Network* generator = nullptr) {
    std::vector<Vec> x, y;
    const std::size_t n = ds.size() * (generator != nullptr ? 2 : 1);
    x.reserve(n);
    y.reserve(n);
    for (const auto& rec : ds.records) {
        x.push_back(rec.image);
        y.push_back({rec.p / kPScale, rec.theta / kThetaScale});
        if (generator != nullptr) {
            x.push_back(evaluate(*generator, {rec.p, rec.theta, rec.z1, rec.z2}));
            y.push_back(y.back());
        }
    }
    TrainResult res = train_mlp(x, y, 2, cfg);
    res.net = fold_output_scaling(std::move(res.net), {kPScale, kThetaScale});
    return res;
}

}  // namespace taxiverify
