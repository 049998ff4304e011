// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <taxiverify/network.hpp>
#include <taxiverify/rng.hpp>
#include <taxiverify/zonotope.hpp>

namespace tvtest {

using namespace taxiverify;

// Random ReLU network with `hidden` hidden layers of width `width`, weights
// uniform in [-scale, scale].
inline Network random_network(Rng& rng, std::size_t in_dim, std::size_t out_dim,
                              std::size_t hidden, std::size_t width, double scale = 1.0) {
    Network net;
    std::size_t prev = in_dim;
    for (std::size_t l = 0; l <= hidden; ++l) {
        const std::size_t cur = l == hidden ? out_dim : width;
        Layer layer;
        layer.weights = Mat(cur, prev);
        for (double& w : layer.weights.data) w = rng.uniform(-scale, scale);
        layer.bias = rng.uniform_vec(cur, -scale, scale);
        layer.activation = l == hidden ? Activation::Identity : Activation::ReLU;
        net.layers.push_back(std::move(layer));
        prev = cur;
    }
    net.validate();
    return net;
}

inline Box random_box(Rng& rng, std::size_t dim, double lo = -2.0, double hi = 2.0) {
    Box b{Vec(dim), Vec(dim)};
    for (std::size_t i = 0; i < dim; ++i) {
        const double a = rng.uniform(lo, hi);
        const double c = rng.uniform(lo, hi);
        b.lo[i] = std::min(a, c);
        b.hi[i] = std::max(a, c);
    }
    return b;
}

inline Vec random_point_in(Rng& rng, const Box& b) {
    Vec x(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) x[i] = rng.uniform(b.lo[i], b.hi[i]);
    return x;
}

}  // namespace tvtest
