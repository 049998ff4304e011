// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "taxiverify/closed_loop.hpp"

namespace taxiverify {

/// Certified distance from a reference image to the generator's output set
/// with the state pinned, minimizing over the latent box.
struct DistanceRecord {
    std::size_t record_index = 0;
    double distance = 0.0;  // certified upper bound on the minimum L2 distance
    bool certified = false;
    Vec witness_z;
};

/// Nearest-generated-image distance for one reference image: the state inputs
/// of the generator are pinned to s_i (point box) and branch and bound
/// minimizes the L2 distance to o_i over the latent box. The reported distance
/// is the attained upper bound, so an uncertified result is pessimistic, never
/// optimistic.
inline DistanceRecord nearest_distance(const Network& gen, const State& s_i, const Vec& o_i,
                                       const Box& latent, double tol = 1e-4,
                                       std::uint64_t budget = 200000, std::size_t record_index = 0) {
    check_dim(o_i.size(), gen.output_dim(), "nearest_distance target");
    const Box state_point{{s_i.p, s_i.theta}, {s_i.p, s_i.theta}};
    const Box in = detail::composite_input_box(gen, state_point, latent);
    DistanceRecord rec;
    rec.record_index = record_index;
    try {
        const BnbResult res = minimize(gen, in, Objective::l2_distance(o_i), tol, budget);
        rec.distance = res.upper_bound;
        rec.certified = res.certified;
        // Latent components of the witness, in latent-box order.
        int ip = gen.input_index("p");
        int it = gen.input_index("theta");
        if (ip < 0 || it < 0) {
            ip = 0;
            it = 1;
        }
        for (std::size_t i = 0; i < res.witness.size(); ++i)
            if (static_cast<int>(i) != ip && static_cast<int>(i) != it)
                rec.witness_z.push_back(res.witness[i]);
    } catch (const std::exception& e) {
        throw std::runtime_error("nearest_distance: record " + std::to_string(record_index) + ": " +
                                 e.what());
    }
    return rec;
}

/// Distances for a whole evaluation set; records are independent queries,
/// gathered by record index.
inline std::vector<DistanceRecord> all_nearest_distances(const Network& gen,
                                                         const std::vector<State>& states,
                                                         const std::vector<Vec>& images,
                                                         const Box& latent, double tol = 1e-4,
                                                         std::uint64_t budget = 200000,
                                                         unsigned threads = 1) {
    if (states.size() != images.size())
        throw std::invalid_argument("all_nearest_distances: states/images length mismatch");
    std::vector<DistanceRecord> out(states.size());
    parallel_for(states.size(), threads, [&](std::size_t i) {
        out[i] = nearest_distance(gen, states[i], images[i], latent, tol, budget, i);
    });
    return out;
}

/// Cumulative distribution of certified distances: recall(r) = fraction of
/// records with distance <= r.
struct RecallCurve {
    Vec thresholds;  // ascending
    Vec recall;      // in [0, 1], nondecreasing
};

inline RecallCurve recall_curve(const std::vector<DistanceRecord>& records, const Vec& r_grid) {
    if (records.empty()) throw std::invalid_argument("recall_curve: no records");
    if (!std::is_sorted(r_grid.begin(), r_grid.end()))
        throw std::invalid_argument("recall_curve: thresholds must be ascending");
    Vec d;
    d.reserve(records.size());
    for (const auto& rec : records) d.push_back(rec.distance);
    std::sort(d.begin(), d.end());
    RecallCurve curve;
    curve.thresholds = r_grid;
    curve.recall.reserve(r_grid.size());
    for (double r : r_grid) {
        const auto n_le = std::upper_bound(d.begin(), d.end(), r) - d.begin();
        curve.recall.push_back(static_cast<double>(n_le) / static_cast<double>(d.size()));
    }
    return curve;
}

/// Evenly spaced thresholds from 0 to the max recorded distance (inclusive).
inline Vec default_threshold_grid(const std::vector<DistanceRecord>& records, std::size_t n = 101) {
    if (records.empty() || n < 2) throw std::invalid_argument("default_threshold_grid: bad input");
    double dmax = 0.0;
    for (const auto& rec : records) dmax = std::max(dmax, rec.distance);
    Vec r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = dmax * static_cast<double>(i) / static_cast<double>(n - 1);
    return r;
}

/// Histogram of distances over [0, hi] with the given bin count.
struct DistanceHistogram {
    Vec bin_lo, bin_hi;
    std::vector<std::size_t> count;
};

inline DistanceHistogram distance_histogram(const std::vector<DistanceRecord>& records,
                                            std::size_t bins, double hi) {
    if (bins == 0 || !(hi > 0.0)) throw std::invalid_argument("distance_histogram: bad input");
    DistanceHistogram h;
    const double w = hi / static_cast<double>(bins);
    h.count.assign(bins, 0);
    for (std::size_t b = 0; b < bins; ++b) {
        h.bin_lo.push_back(static_cast<double>(b) * w);
        h.bin_hi.push_back(static_cast<double>(b + 1) * w);
    }
    for (const auto& rec : records) {
        auto b = static_cast<std::size_t>(rec.distance / w);
        if (b >= bins) b = bins - 1;  // overflow bin
        ++h.count[b];
    }
    return h;
}

}  // namespace taxiverify
