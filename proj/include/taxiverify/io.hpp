// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "taxiverify/closed_loop.hpp"
#include "taxiverify/dataset.hpp"
#include "taxiverify/recall.hpp"

namespace taxiverify {

/// Shortest round-trip decimal form of a double, so files are byte-stable and
/// parse back bit-exactly.
inline std::string fmt_double(double x) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, p);
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return is;
}

// ---------------------------------------------------------------------------
// CSV outputs
// ---------------------------------------------------------------------------

inline void write_trajectory_csv(const std::vector<TrajectoryPoint>& traj, std::ostream& os) {
    os << "t,p,theta,phi,p_hat,theta_hat\n";
    for (const auto& pt : traj)
        os << fmt_double(pt.t) << ',' << fmt_double(pt.s.p) << ',' << fmt_double(pt.s.theta) << ','
           << fmt_double(pt.phi) << ',' << fmt_double(pt.p_hat) << ',' << fmt_double(pt.theta_hat)
           << '\n';
}

/// Several trajectories in one file, tagged by a leading run index.
inline void write_trajectories_csv(const std::vector<std::vector<TrajectoryPoint>>& trajs,
                                   std::ostream& os) {
    os << "run,t,p,theta,phi,p_hat,theta_hat\n";
    for (std::size_t r = 0; r < trajs.size(); ++r)
        for (const auto& pt : trajs[r])
            os << r << ',' << fmt_double(pt.t) << ',' << fmt_double(pt.s.p) << ','
               << fmt_double(pt.s.theta) << ',' << fmt_double(pt.phi) << ','
               << fmt_double(pt.p_hat) << ',' << fmt_double(pt.theta_hat) << '\n';
}

inline void write_action_bounds_csv(const std::vector<ActionBounds>& bounds, std::ostream& os) {
    os << "cell_index,phi_min,phi_max,certified\n";
    for (const auto& ab : bounds)
        os << ab.cell << ',' << fmt_double(ab.phi_min) << ',' << fmt_double(ab.phi_max) << ','
           << (ab.certified ? 1 : 0) << '\n';
}

inline std::vector<ActionBounds> read_action_bounds_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "cell_index,phi_min,phi_max,certified")
        throw std::invalid_argument("action bounds file: bad header");
    std::vector<ActionBounds> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        ActionBounds ab;
        char c1, c2, c3;
        int cert;
        if (!(ss >> ab.cell >> c1 >> ab.phi_min >> c2 >> ab.phi_max >> c3 >> cert) || c1 != ',' ||
            c2 != ',' || c3 != ',')
            throw std::invalid_argument("action bounds file: bad row: " + line);
        ab.certified = cert != 0;
        out.push_back(ab);
    }
    return out;
}

inline void write_cell_labels_csv(const Grid& grid, const std::vector<CellLabel>& labels,
                                  std::ostream& os) {
    if (labels.size() != grid.n_cells())
        throw std::invalid_argument("write_cell_labels_csv: labels do not cover the grid");
    os << "cell_index,p_lo,p_hi,theta_lo,theta_hi,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const Box b = grid.cell_bounds(static_cast<CellId>(i));
        os << i << ',' << fmt_double(b.lo[0]) << ',' << fmt_double(b.hi[0]) << ','
           << fmt_double(b.lo[1]) << ',' << fmt_double(b.hi[1]) << ','
           << (labels[i] == CellLabel::Safe ? "SAFE" : "INCONCLUSIVE") << '\n';
    }
}

inline void write_dataset_csv(const Dataset& ds, std::ostream& os) {
    os << "p,theta,z1,z2";
    for (std::size_t k = 0; k < kImagePixels; ++k) os << ",px_" << k;
    os << '\n';
    for (const auto& rec : ds.records) {
        os << fmt_double(rec.p) << ',' << fmt_double(rec.theta) << ',' << fmt_double(rec.z1) << ','
           << fmt_double(rec.z2);
        for (double px : rec.image) os << ',' << fmt_double(px);
        os << '\n';
    }
}

inline void write_distances_csv(const std::vector<DistanceRecord>& records, std::ostream& os) {
    os << "index,distance,certified,z1,z2\n";
    for (const auto& rec : records) {
        os << rec.record_index << ',' << fmt_double(rec.distance) << ',' << (rec.certified ? 1 : 0);
        for (std::size_t i = 0; i < 2; ++i)
            os << ',' << fmt_double(i < rec.witness_z.size() ? rec.witness_z[i] : 0.0);
        os << '\n';
    }
}

inline void write_recall_csv(const RecallCurve& curve, std::ostream& os) {
    os << "r,recall\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i)
        os << fmt_double(curve.thresholds[i]) << ',' << fmt_double(curve.recall[i]) << '\n';
}

inline void write_histogram_csv(const DistanceHistogram& h, std::ostream& os) {
    os << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < h.count.size(); ++i)
        os << fmt_double(h.bin_lo[i]) << ',' << fmt_double(h.bin_hi[i]) << ',' << h.count[i] << '\n';
}

inline void write_loss_csv(const Vec& generator_loss, const Vec& controller_loss, std::ostream& os) {
    os << "epoch,generator_loss,controller_loss\n";
    const std::size_t n = std::max(generator_loss.size(), controller_loss.size());
    for (std::size_t i = 0; i < n; ++i) {
        os << i << ',';
        if (i < generator_loss.size()) os << fmt_double(generator_loss[i]);
        os << ',';
        if (i < controller_loss.size()) os << fmt_double(controller_loss[i]);
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// PGM heatmaps (binary P5, 8-bit). Rows sweep theta from high to low so the
// image reads like a plot with theta up and p to the right.
// ---------------------------------------------------------------------------

inline void write_pgm(const std::vector<std::uint8_t>& pixels, std::size_t width, std::size_t height,
                      std::ostream& os) {
    if (pixels.size() != width * height) throw std::invalid_argument("write_pgm: size mismatch");
    os << "P5\n" << width << ' ' << height << "\n255\n";
    os.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

/// Rendered or generated observation as an 8-bit PGM, values = round(pixel*255)
/// after clamping to [0, 1].
inline void write_image_pgm(const Vec& image, std::ostream& os) {
    if (image.size() != kImagePixels) throw std::invalid_argument("write_image_pgm: not an observation");
    std::vector<std::uint8_t> px(image.size());
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double v = std::clamp(image[i], 0.0, 1.0);
        px[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    write_pgm(px, kImageWidth, kImageHeight, os);
}

inline void write_labels_pgm(const Grid& grid, const std::vector<CellLabel>& labels,
                             std::ostream& os) {
    if (labels.size() != grid.n_cells())
        throw std::invalid_argument("write_labels_pgm: labels do not cover the grid");
    std::vector<std::uint8_t> px(grid.n_cells());
    for (std::size_t it = 0; it < grid.bins[1]; ++it)
        for (std::size_t ip = 0; ip < grid.bins[0]; ++ip) {
            const std::size_t row = grid.bins[1] - 1 - it;
            px[row * grid.bins[0] + ip] =
                labels[static_cast<std::size_t>(grid.cell_at(ip, it))] == CellLabel::Safe ? 255 : 64;
        }
    write_pgm(px, grid.bins[0], grid.bins[1], os);
}

inline void write_cellset_pgm(const Grid& grid, const CellSet& set, std::ostream& os) {
    if (set.n != grid.n_cells())
        throw std::invalid_argument("write_cellset_pgm: set does not cover the grid");
    std::vector<std::uint8_t> px(grid.n_cells());
    for (std::size_t it = 0; it < grid.bins[1]; ++it)
        for (std::size_t ip = 0; ip < grid.bins[0]; ++ip) {
            const std::size_t row = grid.bins[1] - 1 - it;
            px[row * grid.bins[0] + ip] =
                set.get(static_cast<std::size_t>(grid.cell_at(ip, it))) ? 255 : 0;
        }
    write_pgm(px, grid.bins[0], grid.bins[1], os);
}

// ---------------------------------------------------------------------------
// Run-length-encoded bitsets: "cells=N" then runs "VxL" (value x length)
// covering all N cells in index order.
// ---------------------------------------------------------------------------

inline void write_cellset_rle(const CellSet& set, std::ostream& os) {
    os << "cells=" << set.n << '\n';
    std::size_t i = 0;
    bool first = true;
    while (i < set.n) {
        const bool v = set.get(i);
        std::size_t j = i;
        while (j < set.n && set.get(j) == v) ++j;
        if (!first) os << ' ';
        os << (v ? 1 : 0) << 'x' << (j - i);
        first = false;
        i = j;
    }
    os << '\n';
}

inline CellSet read_cellset_rle(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("cells=", 0) != 0)
        throw std::invalid_argument("bitset file: bad header");
    const std::size_t n = std::stoull(header.substr(6));
    CellSet set(n);
    std::size_t i = 0;
    std::string tok;
    while (is >> tok) {
        const auto x = tok.find('x');
        if (x == std::string::npos) throw std::invalid_argument("bitset file: bad run: " + tok);
        const int v = std::stoi(tok.substr(0, x));
        const std::size_t len = std::stoull(tok.substr(x + 1));
        if (i + len > n) throw std::invalid_argument("bitset file: runs exceed declared size");
        if (v) for (std::size_t k = 0; k < len; ++k) set.set(i + k);
        i += len;
    }
    if (i != n) throw std::invalid_argument("bitset file: runs do not cover declared size");
    return set;
}

}  // namespace taxiverify
