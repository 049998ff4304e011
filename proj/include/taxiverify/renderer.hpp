// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "taxiverify/plant.hpp"

namespace taxiverify {

inline constexpr std::size_t kImageHeight = 8;
inline constexpr std::size_t kImageWidth = 16;
inline constexpr std::size_t kImagePixels = kImageHeight * kImageWidth;

/// Deterministic synthetic runway camera. Ground-plane projection of a runway
/// with two edge lines and a dashed centerline, seen from a wing-mounted camera
/// at crosstrack p with yaw theta. Latent z1 shifts the dash phase over one
/// full dash period; z2 tilts the global brightness by up to +-10%. Pixels are
/// mean-biased to 0.5 and clamped to [0, 1]. All features are anti-aliased with
/// ramps matched to the ground footprint of a pixel, so the image is a
/// piecewise-smooth function of (p, theta, z).
struct RendererParams {
    double wing_offset = 1.5;      // camera crosstrack offset from aircraft reference, m
    double tan_half_fov = 2.4;     // lateral half field of view (tan)
    double near_distance = 4.5;    // ground distance of the bottom pixel row, m
    double row_ratio = 1.45;       // geometric spacing of row distances
    double runway_half_width = 10.0;  // edge lines sit here, m
    double edge_half_width = 0.5;     // edge line half width, m
    double center_half_width = 0.35;  // centerline half width, m
    double dash_length = 9.0;         // lit portion of a dash period, m
    double dash_period = 15.0;        // dash + gap, m
    double asphalt = 0.30;
    double terrain = 0.12;
    double edge_brightness = 0.95;
    double center_brightness = 0.85;
    double brightness_tilt = 0.10;  // max relative tilt from z2
    double mean_bias = 0.5;
};

namespace detail {

// CDF of a unit-mass triangular kernel of half-width aa.
inline double tent_cdf(double t, double aa) {
    if (t <= -aa) return 0.0;
    if (t >= aa) return 1.0;
    if (t < 0.0) {
        const double s = t + aa;
        return s * s / (2.0 * aa * aa);
    }
    const double s = aa - t;
    return 1.0 - s * s / (2.0 * aa * aa);
}

// Coverage of |x - c| <= half, anti-aliased with a triangular kernel whose
// half-width aa equals the pixel pitch. Hat-function sampling reproduces the
// line's position and mass exactly, so image features slide smoothly and
// strictly monotonically across pixels.
inline double line_coverage(double x, double c, double half, double aa) {
    return tent_cdf(x - c + half, aa) - tent_cdf(x - c - half, aa);
}

// Coverage of the lit part of the dash cycle at downtrack position u.
inline double dash_coverage(double u, double phase, const RendererParams& rp, double aa) {
    double frac = std::fmod(u + phase, rp.dash_period);
    if (frac < 0.0) frac += rp.dash_period;
    // Distance from the dash segment [0, dash_length] within the cycle,
    // wrapping through the gap on either side.
    const double mid = 0.5 * rp.dash_length;
    double d = std::abs(frac - mid);
    d = std::min(d, rp.dash_period - frac + mid);  // wrap below 0
    return std::clamp((mid + 0.5 * aa - d) / aa, 0.0, 1.0);
}

}  // namespace detail

/// Renders the 8x16 grayscale observation for state s and latent z in [-1,1]^2,
/// flattened row-major (top row first).
inline Vec render(const State& s, const Vec& z, const RendererParams& rp = {}) {
    if (z.size() != 2) throw std::invalid_argument("render: latent must be 2-d");
    if (!(std::abs(s.p) <= 11.0 && std::abs(s.theta) <= 30.0))
        throw std::invalid_argument("render: state outside domain");
    const double cam_p = s.p + rp.wing_offset;
    const double cth = std::cos(s.theta * kDegToRad);
    const double sth = std::sin(s.theta * kDegToRad);
    const double phase = z[0] * 0.5 * rp.dash_period;
    const double tilt = 1.0 + rp.brightness_tilt * z[1];

    Vec img(kImagePixels);
    for (std::size_t r = 0; r < kImageHeight; ++r) {
        // Bottom row is nearest; distances grow geometrically toward the top.
        const double d = rp.near_distance * std::pow(rp.row_ratio, static_cast<double>(kImageHeight - 1 - r));
        const double lateral_per_px = 2.0 * d * rp.tan_half_fov / static_cast<double>(kImageWidth);
        const double aa_lat = lateral_per_px;           // lateral anti-alias footprint
        const double aa_down = 0.35 * d;                // downtrack footprint grows with range
        for (std::size_t c = 0; c < kImageWidth; ++c) {
            // Column pitch equals the anti-alias footprint, so line coverage
            // varies linearly as a feature slides across the image.
            const double lateral = (static_cast<double>(c) - 7.5) * lateral_per_px;
            // Runway-frame coordinates of the viewed ground point.
            const double w = cam_p + lateral * cth + d * sth;
            const double u = -lateral * sth + d * cth;

            const double on_runway =
                detail::line_coverage(w, 0.0, rp.runway_half_width + rp.edge_half_width, aa_lat);
            double px = rp.terrain + (rp.asphalt - rp.terrain) * on_runway;
            const double edges =
                std::max(detail::line_coverage(w, -rp.runway_half_width, rp.edge_half_width, aa_lat),
                         detail::line_coverage(w, rp.runway_half_width, rp.edge_half_width, aa_lat));
            px += (rp.edge_brightness - rp.asphalt) * edges;
            const double center = detail::line_coverage(w, 0.0, rp.center_half_width, aa_lat) *
                                  detail::dash_coverage(u, phase, rp, aa_down);
            px += (rp.center_brightness - rp.asphalt) * center * (1.0 - edges);
            px *= tilt;
            img[r * kImageWidth + c] = px;
        }
    }
    // Bias so the clamped image has the target mean. Clamping interacts with
    // the shift, so solve mean(clamp(img + bias)) = target by bisection; the
    // clamped mean is continuous and nondecreasing in the bias.
    const auto clamped_mean = [&](double bias) {
        double m = 0.0;
        for (double px : img) m += std::clamp(px + bias, 0.0, 1.0);
        return m / static_cast<double>(kImagePixels);
    };
    double lo = -2.0, hi = 2.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clamped_mean(mid) < rp.mean_bias ? lo : hi) = mid;
    }
    const double bias = 0.5 * (lo + hi);
    for (double& px : img) px = std::clamp(px + bias, 0.0, 1.0);
    return img;
}

}  // namespace taxiverify
