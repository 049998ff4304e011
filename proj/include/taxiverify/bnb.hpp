// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "taxiverify/zonotope.hpp"

namespace taxiverify {

/// Convex objective over the network output.
struct Objective {
    enum class Kind { Linear, L2Distance };
    Kind kind = Kind::Linear;
    Vec v;  // coefficient vector (Linear) or target point (L2Distance)

    static Objective linear(Vec c) { return {Kind::Linear, std::move(c)}; }
    static Objective l2_distance(Vec target) { return {Kind::L2Distance, std::move(target)}; }

    double value(const Vec& y) const {
        return kind == Kind::Linear ? dot(v, y) : l2_distance_(y);
    }

    /// Sound lower bound over the propagated output set. Linear objectives use
    /// the zonotope directly; L2 uses per-coordinate interval distance.
    double lower_bound(const Zonotope& z, const Box& out_box) const {
        if (kind == Kind::Linear) return linear_bounds(z, v).first;
        double acc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = std::max({out_box.lo[i] - v[i], v[i] - out_box.hi[i], 0.0});
            acc += d * d;
        }
        return std::sqrt(acc);
    }

  private:
    double l2_distance_(const Vec& y) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = y[i] - v[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
};

struct BnbResult {
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    Vec witness;  // input attaining the best concrete objective value found
    std::uint64_t nodes_expanded = 0;
    bool certified = false;  // upper - lower <= tol on return

    double gap() const { return upper_bound - lower_bound; }
};

namespace detail {

struct BnbNode {
    double lb;
    Box box;
};

// Min-heap order on lb; ties broken by lexicographically smallest box.lo so
// runs are deterministic regardless of construction order.
struct BnbNodeOrder {
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        if (a.lb != b.lb) return a.lb > b.lb;
        return a.box.lo > b.box.lo;
    }
};

}  // namespace detail

/// Certified global minimization of obj over {evaluate(net, x) : x in input} by
/// best-first branch and bound with DeepZ lower bounds. Splits the widest
/// dimension relative to the original box widths at the midpoint. Terminates
/// with certified = true once upper - lower <= tol; if the node budget runs out
/// first, the current (still sound) bounds are returned with certified = false.
inline BnbResult minimize(const Network& net, const Box& input, const Objective& obj, double tol = 1e-4,
                          std::uint64_t budget = 200000) {
    input.validate();
    check_dim(input.dim(), net.input_dim(), "minimize");
    check_dim(obj.v.size(), net.output_dim(), "minimize objective");
    if (!(tol > 0.0)) throw std::invalid_argument("minimize: tol must be positive");
    if (budget == 0) throw std::invalid_argument("minimize: budget must be positive");

    const Vec orig_width = [&] {
        Vec w(input.dim());
        for (std::size_t i = 0; i < input.dim(); ++i) w[i] = input.width(i);
        return w;
    }();

    BnbResult best;
    best.upper_bound = std::numeric_limits<double>::infinity();

    auto try_witness = [&](const Vec& x) {
        const double val = obj.value(evaluate(net, x));
        if (val < best.upper_bound) {
            best.upper_bound = val;
            best.witness = x;
        }
    };

    // Bound a box and probe concrete upper-bound candidates.
    auto bound_box = [&](const Box& b) {
        auto [out_box, z] = propagate(net, b);
        try_witness(b.center());
        if (obj.kind == Objective::Kind::Linear) {
            // Vertex suggested by the signs of c^T applied to the input-aligned
            // generator columns (the first dim() columns from from_box).
            Vec x = b.center();
            bool any = false;
            for (std::size_t j = 0; j < b.dim(); ++j) {
                double cg = 0.0;
                for (std::size_t i = 0; i < z.dim(); ++i) cg += obj.v[i] * z.generators(i, j);
                if (cg > 0.0) { x[j] = b.lo[j]; any = true; }
                else if (cg < 0.0) { x[j] = b.hi[j]; any = true; }
            }
            if (any) try_witness(x);
        }
        return obj.lower_bound(z, out_box);
    };

    std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>, detail::BnbNodeOrder> queue;
    queue.push({bound_box(input), input});
    double pruned_min_lb = std::numeric_limits<double>::infinity();

    auto global_lb = [&] {
        double lb = std::min(pruned_min_lb, best.upper_bound);
        if (!queue.empty()) lb = std::min(lb, queue.top().lb);
        return lb;
    };

    while (!queue.empty()) {
        best.lower_bound = global_lb();
        if (best.upper_bound - best.lower_bound <= tol) {
            best.certified = true;
            return best;
        }
        if (best.nodes_expanded >= budget) return best;  // uncertified, bounds still sound

        detail::BnbNode node = queue.top();
        queue.pop();
        ++best.nodes_expanded;

        // Widest dimension relative to the original widths.
        std::size_t split_dim = 0;
        double split_score = -1.0;
        for (std::size_t i = 0; i < node.box.dim(); ++i) {
            if (orig_width[i] <= 0.0 || node.box.width(i) <= 0.0) continue;
            const double score = node.box.width(i) / orig_width[i];
            if (score > split_score) {
                split_score = score;
                split_dim = i;
            }
        }
        if (split_score < 0.0) continue;  // point box, nothing left to split

        const double mid = 0.5 * (node.box.lo[split_dim] + node.box.hi[split_dim]);
        for (int half = 0; half < 2; ++half) {
            Box child = node.box;
            (half == 0 ? child.hi : child.lo)[split_dim] = mid;
            if (child.width(split_dim) <= 0.0) continue;  // midpoint hit a bound at float limit
            const double lb = std::max(bound_box(child), node.lb);
            if (lb >= best.upper_bound - tol)
                pruned_min_lb = std::min(pruned_min_lb, lb);  // cannot tighten the gap below tol
            else
                queue.push({lb, std::move(child)});
        }
    }

    best.lower_bound = global_lb();
    best.certified = best.upper_bound - best.lower_bound <= tol;
    return best;
}

/// Certified maximization, implemented as minimize of the negated objective.
/// On return, witness attains lower_bound and upper_bound is the certified
/// outer bound on the maximum. Only linear objectives have a well-defined
/// negation here.
inline BnbResult maximize(const Network& net, const Box& input, const Objective& obj, double tol = 1e-4,
                          std::uint64_t budget = 200000) {
    if (obj.kind != Objective::Kind::Linear)
        throw std::invalid_argument("maximize: only linear objectives are supported");
    Vec neg = obj.v;
    for (double& c : neg) c = -c;
    BnbResult res = minimize(net, input, Objective::linear(std::move(neg)), tol, budget);
    std::swap(res.lower_bound, res.upper_bound);
    res.lower_bound = -res.lower_bound;
    res.upper_bound = -res.upper_bound;
    return res;
}

}  // namespace taxiverify
