// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "taxiverify/bnb.hpp"
#include "taxiverify/grid.hpp"
#include "taxiverify/parallel.hpp"
#include "taxiverify/plant.hpp"

namespace taxiverify {

/// Verified steering-angle range over one cell x latent box.
struct ActionBounds {
    CellId cell = 0;
    double phi_min = 0.0;
    double phi_max = 0.0;
    bool certified = false;
};

namespace detail {

// Input box for the composite network: state dims from the cell, latent dims
// from the latent box. Dims are matched by input_names ("p", "theta"); without
// names the layout is assumed to be (p, theta, z...).
inline Box composite_input_box(const Network& composite, const Box& cell_box, const Box& latent) {
    const std::size_t d = composite.input_dim();
    if (d != 2 + latent.dim())
        throw std::invalid_argument("composite network input dim " + std::to_string(d) +
                                    " does not match 2 state dims + " + std::to_string(latent.dim()) +
                                    " latent dims");
    int ip = composite.input_index("p");
    int it = composite.input_index("theta");
    if (ip < 0 || it < 0) {
        ip = 0;
        it = 1;
    }
    Box in{Vec(d), Vec(d)};
    std::size_t z = 0;
    for (std::size_t i = 0; i < d; ++i) {
        if (static_cast<int>(i) == ip) {
            in.lo[i] = cell_box.lo[0];
            in.hi[i] = cell_box.hi[0];
        } else if (static_cast<int>(i) == it) {
            in.lo[i] = cell_box.lo[1];
            in.hi[i] = cell_box.hi[1];
        } else {
            in.lo[i] = latent.lo[z];
            in.hi[i] = latent.hi[z];
            ++z;
        }
    }
    return in;
}

}  // namespace detail

/// Certified bounds on the control-law output over a cell x latent box, via
/// branch-and-bound on the linear functional [kGainP, kGainTheta]^T h(s, z).
/// Budget-exhausted queries keep their (wider but sound) outer bounds.
inline ActionBounds action_bounds(const Network& composite, const Grid& grid, CellId cell,
                                  const Box& latent, double tol = 1e-4,
                                  std::uint64_t budget = 200000) {
    if (composite.output_dim() != 2)
        throw std::invalid_argument("action_bounds: composite must output (p_hat, theta_hat)");
    const Box in = detail::composite_input_box(composite, grid.cell_bounds(cell), latent);
    const Objective obj = Objective::linear({kGainP, kGainTheta});
    ActionBounds out;
    out.cell = cell;
    try {
        const BnbResult lo = minimize(composite, in, obj, tol, budget);
        const BnbResult hi = maximize(composite, in, obj, tol, budget);
        out.phi_min = lo.lower_bound;
        out.phi_max = hi.upper_bound;
        out.certified = lo.certified && hi.certified;
    } catch (const std::exception& e) {
        throw std::runtime_error("action_bounds: cell " + std::to_string(cell) + ": " + e.what());
    }
    return out;
}

/// Per-cell action bounds for the whole grid; cells are independent queries
/// and run on `threads` workers, gathered by cell index.
inline std::vector<ActionBounds> all_action_bounds(const Network& composite, const Grid& grid,
                                                   const Box& latent, double tol = 1e-4,
                                                   std::uint64_t budget = 200000,
                                                   unsigned threads = 1) {
    std::vector<ActionBounds> out(grid.n_cells());
    parallel_for(grid.n_cells(), threads, [&](std::size_t i) {
        out[i] = action_bounds(composite, grid, static_cast<CellId>(i), latent, tol, budget);
    });
    return out;
}

/// Action bounds for a refined grid, inherited from bounds computed on a
/// coarser base grid (each fine cell takes its covering base cell's range;
/// a superset of the fine cell's true range, so still sound).
inline std::vector<ActionBounds> inherit_action_bounds(const Grid& base_grid,
                                                       const std::vector<ActionBounds>& base_bounds,
                                                       const Grid& fine_grid) {
    if (base_bounds.size() != base_grid.n_cells())
        throw std::invalid_argument("inherit_action_bounds: bounds do not cover the base grid");
    std::vector<ActionBounds> out(fine_grid.n_cells());
    for (std::size_t i = 0; i < fine_grid.n_cells(); ++i) {
        const Vec c = fine_grid.cell_bounds(static_cast<CellId>(i)).center();
        const CellId parent = base_grid.locate(c[0], c[1]);
        if (parent == kSink)
            throw std::invalid_argument("inherit_action_bounds: fine grid extends beyond base grid");
        out[i] = base_bounds[static_cast<std::size_t>(parent)];
        out[i].cell = static_cast<CellId>(i);
    }
    return out;
}

/// Overapproximated one-step successor relation over the grid.
struct TransitionMap {
    std::size_t n_cells = 0;
    std::vector<std::vector<CellId>> successors;  // in-domain successors, ascending
    std::vector<char> to_sink;                    // cell may leave the domain
};

inline TransitionMap build_transitions(const Grid& grid, const std::vector<ActionBounds>& bounds,
                                       const PlantParams& params, unsigned threads = 1) {
    if (bounds.size() != grid.n_cells())
        throw std::invalid_argument("build_transitions: need action bounds for every cell");
    TransitionMap tm;
    tm.n_cells = grid.n_cells();
    tm.successors.resize(tm.n_cells);
    tm.to_sink.assign(tm.n_cells, 0);
    parallel_for(tm.n_cells, threads, [&](std::size_t i) {
        const auto& ab = bounds[i];
        if (ab.cell != static_cast<CellId>(i))
            throw std::invalid_argument("build_transitions: bounds not indexed by cell");
        const Box next =
            step_overapprox(grid.cell_bounds(static_cast<CellId>(i)), ab.phi_min, ab.phi_max, params);
        // Cells are half-open, so the step image's upper faces are not attained.
        auto ov = grid.overlapping_cells(next, {true, true});
        tm.successors[i] = std::move(ov.cells);
        tm.to_sink[i] = ov.sink ? 1 : 0;
    });
    return tm;
}

/// Unsafe set for the backward DP: cells intersecting |p| > p_limit, plus SINK.
struct UnsafeSet {
    std::vector<char> cells;  // per-cell flag
    bool sink = true;
};

inline UnsafeSet runway_unsafe_set(const Grid& grid, double p_limit = 10.0) {
    UnsafeSet u;
    u.cells.assign(grid.n_cells(), 0);
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        const Box b = grid.cell_bounds(static_cast<CellId>(i));
        if (b.hi[0] > p_limit || b.lo[0] < -p_limit) u.cells[i] = 1;
    }
    return u;
}

enum class CellLabel : std::uint8_t { Safe = 0, Inconclusive = 1 };

/// Least fixed point of the backward-safety recursion: a cell is Inconclusive
/// iff an unsafe cell (or the sink, if unsafe) is reachable in the
/// overapproximated transition graph. Computed by backward BFS on the reverse
/// graph, which is the same fixed point as the worklist DP sweep.
inline std::vector<CellLabel> backward_safety(const TransitionMap& tm, const UnsafeSet& unsafe) {
    if (unsafe.cells.size() != tm.n_cells)
        throw std::invalid_argument("backward_safety: unsafe set does not cover the grid");
    std::vector<std::vector<CellId>> preds(tm.n_cells);
    for (std::size_t c = 0; c < tm.n_cells; ++c)
        for (CellId s : tm.successors[c]) preds[static_cast<std::size_t>(s)].push_back(static_cast<CellId>(c));

    std::vector<CellLabel> label(tm.n_cells, CellLabel::Safe);
    std::vector<CellId> worklist;
    for (std::size_t c = 0; c < tm.n_cells; ++c) {
        const bool bad = unsafe.cells[c] || (unsafe.sink && tm.to_sink[c]);
        if (bad) {
            label[c] = CellLabel::Inconclusive;
            worklist.push_back(static_cast<CellId>(c));
        }
    }
    while (!worklist.empty()) {
        const CellId c = worklist.back();
        worklist.pop_back();
        for (CellId p : preds[static_cast<std::size_t>(c)]) {
            auto& lp = label[static_cast<std::size_t>(p)];
            if (lp == CellLabel::Safe) {
                lp = CellLabel::Inconclusive;
                worklist.push_back(p);
            }
        }
    }
    return label;
}

/// Fixed-size bitset over grid cells.
struct CellSet {
    std::size_t n = 0;
    std::vector<std::uint64_t> words;

    explicit CellSet(std::size_t n_cells = 0) : n(n_cells), words((n_cells + 63) / 64, 0) {}
    bool get(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i) { words[i >> 6] |= std::uint64_t{1} << (i & 63); }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }
    bool operator==(const CellSet& other) const = default;
};

/// Per-timestep overapproximated reachable sets.
struct ReachSet {
    std::vector<CellSet> steps;      // steps[t] = cells possibly occupied at time t
    std::vector<char> sink;          // sink[t] = domain may have been left by time t
    std::optional<std::size_t> converged_at;  // first t with R_{t+1} = R_t
};

/// Forward reachability from an initial region: R_0 = overlapping cells,
/// R_{t+1} = union of successors of R_t, sink absorbing. Stops early once the
/// set is invariant, else after max_steps transitions.
inline ReachSet forward_reach(const TransitionMap& tm, const Grid& grid, const Box& initial,
                              std::size_t max_steps) {
    ReachSet rs;
    CellSet cur(tm.n_cells);
    const auto ov = grid.overlapping_cells(initial);
    for (CellId c : ov.cells) cur.set(static_cast<std::size_t>(c));
    bool sink = ov.sink;
    rs.steps.push_back(cur);
    rs.sink.push_back(sink ? 1 : 0);
    for (std::size_t t = 0; t < max_steps; ++t) {
        CellSet next(tm.n_cells);
        for (std::size_t c = 0; c < tm.n_cells; ++c) {
            if (!cur.get(c)) continue;
            if (tm.to_sink[c]) sink = true;
            for (CellId s : tm.successors[c]) next.set(static_cast<std::size_t>(s));
        }
        if (next == cur && (sink ? 1 : 0) == rs.sink.back()) {
            rs.converged_at = t;
            return rs;
        }
        rs.steps.push_back(next);
        rs.sink.push_back(sink ? 1 : 0);
        cur = std::move(next);
    }
    return rs;
}

}  // namespace taxiverify
