// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "taxiverify/zonotope.hpp"

namespace taxiverify {

using CellId = std::int64_t;

/// Absorbing out-of-domain cell.
inline constexpr CellId kSink = -1;

/// Uniform hyperrectangular partition of the (p, theta) state space.
///
/// Cells are lower-closed and upper-open in each dimension (the top edge of the
/// domain is closed), so every in-domain state belongs to exactly one cell and
/// locate/overlap conventions agree. Cell index = ip * bins_theta + it.
struct Grid {
    Box domain;                      // (p, theta)
    std::array<std::size_t, 2> bins{};

    Grid() = default;
    Grid(Box d, std::size_t bins_p, std::size_t bins_theta) : domain(std::move(d)), bins{bins_p, bins_theta} {
        domain.validate();
        if (domain.dim() != 2) throw std::invalid_argument("Grid: domain must be 2-d (p, theta)");
        if (bins_p == 0 || bins_theta == 0) throw std::invalid_argument("Grid: bins must be >= 1");
    }

    /// Default runway state space: [-11, 11] m x [-30, 30] deg at 128 x 128.
    static Grid standard(std::size_t bins_p = 128, std::size_t bins_theta = 128) {
        return Grid(Box{{-11.0, -30.0}, {11.0, 30.0}}, bins_p, bins_theta);
    }

    std::size_t n_cells() const { return bins[0] * bins[1]; }
    double width(std::size_t d) const { return domain.width(d) / static_cast<double>(bins[d]); }

    CellId cell_at(std::size_t ip, std::size_t it) const {
        return static_cast<CellId>(ip * bins[1] + it);
    }
    std::array<std::size_t, 2> split_index(CellId id) const {
        const auto u = static_cast<std::size_t>(id);
        return {u / bins[1], u % bins[1]};
    }

    Box cell_bounds(CellId id) const {
        if (id == kSink) throw std::invalid_argument("cell_bounds: SINK has no bounds");
        if (id < 0 || static_cast<std::size_t>(id) >= n_cells())
            throw std::invalid_argument("cell_bounds: cell index out of range");
        const auto [ip, it] = split_index(id);
        Box b{Vec(2), Vec(2)};
        b.lo[0] = domain.lo[0] + static_cast<double>(ip) * width(0);
        b.hi[0] = domain.lo[0] + static_cast<double>(ip + 1) * width(0);
        b.lo[1] = domain.lo[1] + static_cast<double>(it) * width(1);
        b.hi[1] = domain.lo[1] + static_cast<double>(it + 1) * width(1);
        return b;
    }

    /// Containing cell, or SINK for out-of-domain states. Boundary states go to
    /// the higher-index cell; the top edge of the domain is closed.
    CellId locate(double p, double theta) const {
        const std::array<double, 2> x{p, theta};
        std::array<std::size_t, 2> idx{};
        for (std::size_t d = 0; d < 2; ++d) {
            if (x[d] < domain.lo[d] || x[d] > domain.hi[d]) return kSink;
            if (x[d] == domain.hi[d]) {
                idx[d] = bins[d] - 1;
            } else {
                auto i = static_cast<std::int64_t>(std::floor((x[d] - domain.lo[d]) / width(d)));
                if (i < 0) i = 0;
                if (i >= static_cast<std::int64_t>(bins[d])) i = static_cast<std::int64_t>(bins[d]) - 1;
                idx[d] = static_cast<std::size_t>(i);
            }
        }
        return cell_at(idx[0], idx[1]);
    }

    struct Overlap {
        std::vector<CellId> cells;
        bool sink = false;  // region extends outside the domain
    };

    /// Cells intersecting the region. `upper_open[d]` marks the region's upper
    /// face in dimension d as not attained (the convention produced by
    /// step_overapprox over half-open cells); a cell whose lower face merely
    /// touches such an open bound is not reachable and is excluded. Closed
    /// regions include boundary-touching cells on the upper side, matching
    /// locate's boundary convention.
    Overlap overlapping_cells(const Box& region, std::array<bool, 2> upper_open = {false, false}) const {
        region.validate();
        if (region.dim() != 2) throw std::invalid_argument("overlapping_cells: region must be 2-d");
        Overlap out;
        std::array<std::int64_t, 2> first{}, last{};
        for (std::size_t d = 0; d < 2; ++d) {
            const double w = width(d);
            if (region.lo[d] < domain.lo[d] || region.hi[d] > domain.hi[d]) out.sink = true;
            // first cell: smallest i with upper(i) > rlo  =>  i = floor((rlo - lo)/w)
            const double tlo = (region.lo[d] - domain.lo[d]) / w;
            std::int64_t i0 = static_cast<std::int64_t>(std::floor(tlo));
            // last cell: largest i with lower(i) <= rhi (closed) or < rhi (open)
            const double thi = (region.hi[d] - domain.hi[d] == 0.0) ? static_cast<double>(bins[d])
                                                                    : (region.hi[d] - domain.lo[d]) / w;
            std::int64_t i1 = static_cast<std::int64_t>(std::floor(thi));
            if (upper_open[d] && static_cast<double>(i1) == thi) --i1;
            if (static_cast<std::int64_t>(bins[d]) <= i1) i1 = static_cast<std::int64_t>(bins[d]) - 1;
            if (i0 < 0) i0 = 0;
            first[d] = i0;
            last[d] = i1;
            if (upper_open[d] && region.hi[d] <= domain.lo[d]) last[d] = -1;  // entirely below domain
        }
        for (std::int64_t ip = first[0]; ip <= last[0]; ++ip)
            for (std::int64_t it = first[1]; it <= last[1]; ++it)
                out.cells.push_back(cell_at(static_cast<std::size_t>(ip), static_cast<std::size_t>(it)));
        return out;
    }
};

}  // namespace taxiverify
