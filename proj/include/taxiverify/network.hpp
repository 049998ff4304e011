// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxiverify/linalg.hpp"

namespace taxiverify {

enum class Activation { ReLU, Identity };

/// One affine layer followed by an elementwise activation.
struct Layer {
    Mat weights;  // out_dim x in_dim
    Vec bias;     // out_dim
    Activation activation = Activation::ReLU;

    std::size_t in_dim() const { return weights.cols; }
    std::size_t out_dim() const { return weights.rows; }

    void validate() const {
        if (weights.rows != bias.size())
            throw std::invalid_argument("Layer: bias length " + std::to_string(bias.size()) +
                                        " does not match weight rows " +
                                        std::to_string(weights.rows));
        if (!all_finite(weights.data) || !all_finite(bias))
            throw std::invalid_argument("Layer: non-finite parameter");
    }

    bool operator==(const Layer& other) const = default;
};

/// Feedforward ReLU network with named inputs and an optional declared input box.
struct Network {
    std::vector<Layer> layers;
    std::vector<std::string> input_names;
    std::optional<Vec> input_lo;
    std::optional<Vec> input_hi;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }

    void validate() const {
        if (layers.empty()) throw std::invalid_argument("Network: no layers");
        for (const auto& l : layers) l.validate();
        for (std::size_t i = 1; i < layers.size(); ++i) {
            if (layers[i].in_dim() != layers[i - 1].out_dim())
                throw std::invalid_argument(
                    "Network: layer " + std::to_string(i) + " input dim " +
                    std::to_string(layers[i].in_dim()) + " does not match previous output dim " +
                    std::to_string(layers[i - 1].out_dim()));
        }
        if (layers.back().activation != Activation::Identity)
            throw std::invalid_argument("Network: final layer must have identity activation");
        if (!input_names.empty() && input_names.size() != input_dim())
            throw std::invalid_argument("Network: input_names length does not match input_dim");
        if (input_lo.has_value() != input_hi.has_value())
            throw std::invalid_argument("Network: input_lo/input_hi must be given together");
        if (input_lo && (input_lo->size() != input_dim() || input_hi->size() != input_dim()))
            throw std::invalid_argument("Network: input box length does not match input_dim");
    }

    /// Index of a named input, or -1.
    int input_index(const std::string& name) const {
        auto it = std::find(input_names.begin(), input_names.end(), name);
        return it == input_names.end() ? -1 : static_cast<int>(it - input_names.begin());
    }

    bool operator==(const Network& other) const = default;
};

/// Exact forward pass.
inline Vec evaluate(const Network& net, const Vec& x) {
    check_dim(x.size(), net.input_dim(), "evaluate");
    if (!all_finite(x)) throw std::invalid_argument("evaluate: non-finite input");
    Vec v = x;
    for (const auto& layer : net.layers) {
        Vec z = matvec(layer.weights, v);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.bias[i];
        if (layer.activation == Activation::ReLU)
            for (double& zi : z) zi = std::max(zi, 0.0);
        v = std::move(z);
    }
    return v;
}

/// Network computing c(g(.)). Layer lists are concatenated flat; input metadata
/// comes from g.
inline Network concatenate(const Network& g, const Network& c) {
    check_dim(c.input_dim(), g.output_dim(), "concatenate");
    Network out;
    out.layers = g.layers;
    out.layers.insert(out.layers.end(), c.layers.begin(), c.layers.end());
    out.input_names = g.input_names;
    out.input_lo = g.input_lo;
    out.input_hi = g.input_hi;
    out.validate();
    return out;
}

/// Identity network of dimension n (single identity-activated layer).
inline Network identity_network(std::size_t n) {
    Network net;
    net.layers.push_back({Mat::identity(n), Vec(n, 0.0), Activation::Identity});
    return net;
}

}  // namespace taxiverify
