// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "taxiverify/network.hpp"

namespace taxiverify {

/// Axis-aligned hyperrectangle, lo[i] <= hi[i].
struct Box {
    Vec lo;
    Vec hi;

    std::size_t dim() const { return lo.size(); }
    double width(std::size_t i) const { return hi[i] - lo[i]; }

    Vec center() const {
        Vec c(dim());
        for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
        return c;
    }

    bool contains(const Vec& x, double tol = 0.0) const {
        for (std::size_t i = 0; i < dim(); ++i)
            if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
        return true;
    }

    void validate() const {
        if (lo.size() != hi.size()) throw std::invalid_argument("Box: lo/hi length mismatch");
        if (!all_finite(lo) || !all_finite(hi)) throw std::invalid_argument("Box: non-finite bound");
        for (std::size_t i = 0; i < dim(); ++i)
            if (lo[i] > hi[i]) throw std::invalid_argument("Box: lo > hi at dim " + std::to_string(i));
    }

    bool operator==(const Box& other) const = default;
};

/// Affine set {center + generators * eps : eps in [-1,1]^k}.
struct Zonotope {
    Vec center;      // d
    Mat generators;  // d x k

    std::size_t dim() const { return center.size(); }
    std::size_t num_generators() const { return generators.cols; }

    /// Per-coordinate radius: sum of |generator row|.
    Vec radius() const {
        Vec r(dim(), 0.0);
        for (std::size_t i = 0; i < dim(); ++i) {
            const double* row = generators.data.data() + i * generators.cols;
            double acc = 0.0;
            for (std::size_t j = 0; j < generators.cols; ++j) acc += std::abs(row[j]);
            r[i] = acc;
        }
        return r;
    }

    Box interval_hull() const {
        const Vec r = radius();
        Box b{Vec(dim()), Vec(dim())};
        for (std::size_t i = 0; i < dim(); ++i) {
            b.lo[i] = center[i] - r[i];
            b.hi[i] = center[i] + r[i];
        }
        return b;
    }
};

/// Exact zonotope for a box: center at midpoint, one axis generator per dim.
inline Zonotope from_box(const Box& b) {
    b.validate();
    Zonotope z;
    z.center = b.center();
    z.generators = Mat(b.dim(), b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) z.generators(i, i) = 0.5 * b.width(i);
    return z;
}

/// Exact affine image W z + b.
inline Zonotope affine(const Zonotope& z, const Mat& w, const Vec& b) {
    check_dim(z.dim(), w.cols, "affine");
    Zonotope out;
    out.center = matvec(w, z.center);
    for (std::size_t i = 0; i < out.center.size(); ++i) out.center[i] += b[i];
    out.generators = matmul(w, z.generators);
    return out;
}

/// DeepZ ReLU transformer. Stable coordinates pass through or zero out; an
/// unstable coordinate with bounds [l, u] gets the minimal-area relaxation
/// lambda = u/(u-l), mu = -lambda*l/2, with one fresh generator of weight mu.
inline Zonotope relu(const Zonotope& z) {
    const std::size_t d = z.dim();
    const std::size_t k = z.num_generators();
    const Vec r = z.radius();

    std::vector<std::size_t> unstable;
    for (std::size_t i = 0; i < d; ++i) {
        const double l = z.center[i] - r[i];
        const double u = z.center[i] + r[i];
        if (l < 0.0 && u > 0.0) unstable.push_back(i);
    }

    Zonotope out;
    out.center = Vec(d);
    out.generators = Mat(d, k + unstable.size());
    std::size_t fresh = 0;
    for (std::size_t i = 0; i < d; ++i) {
        const double l = z.center[i] - r[i];
        const double u = z.center[i] + r[i];
        const double* src = z.generators.data.data() + i * k;
        double* dst = out.generators.data.data() + i * out.generators.cols;
        if (l >= 0.0) {
            out.center[i] = z.center[i];
            for (std::size_t j = 0; j < k; ++j) dst[j] = src[j];
        } else if (u <= 0.0) {
            out.center[i] = 0.0;
            // generator row stays zero
        } else {
            const double lambda = u / (u - l);
            const double mu = -lambda * l / 2.0;
            out.center[i] = lambda * z.center[i] + mu;
            for (std::size_t j = 0; j < k; ++j) dst[j] = lambda * src[j];
            dst[k + fresh] = mu;
            ++fresh;
        }
    }
    return out;
}

/// Sound output bounding of a network over a box input, alternating exact
/// affine maps with the DeepZ ReLU transformer.
inline std::pair<Box, Zonotope> propagate(const Network& net, const Box& input) {
    check_dim(input.dim(), net.input_dim(), "propagate");
    Zonotope z = from_box(input);
    for (const auto& layer : net.layers) {
        z = affine(z, layer.weights, layer.bias);
        if (layer.activation == Activation::ReLU) z = relu(z);
    }
    return {z.interval_hull(), z};
}

/// Sound bounds on c^T y over the zonotope; tighter than bounding via the
/// interval hull because generator correlations cancel.
inline std::pair<double, double> linear_bounds(const Zonotope& z, const Vec& c) {
    check_dim(c.size(), z.dim(), "linear_bounds");
    const double mid = dot(c, z.center);
    double rad = 0.0;
    for (std::size_t j = 0; j < z.num_generators(); ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < z.dim(); ++i) col += c[i] * z.generators(i, j);
        rad += std::abs(col);
    }
    return {mid - rad, mid + rad};
}

}  // namespace taxiverify
