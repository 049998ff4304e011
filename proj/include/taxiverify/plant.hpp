// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "taxiverify/rng.hpp"
#include "taxiverify/zonotope.hpp"

namespace taxiverify {

// Angle convention: degrees at every interface (state, control, gains);
// radians only inside sin/tan.
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Proportional control gains (phi in degrees from p in meters, theta in degrees).
inline constexpr double kGainP = -0.74;
inline constexpr double kGainTheta = -0.44;

/// Crosstrack position p (meters) and heading error theta (degrees).
struct State {
    double p = 0.0;
    double theta = 0.0;
};

struct PlantParams {
    double v = 5.0;   // taxi speed, m/s
    double L = 5.0;   // wheelbase, m
    double dt = 0.1;  // timestep, s

    void validate() const {
        if (!(v > 0.0) || !(L > 0.0) || !(dt > 0.0))
            throw std::invalid_argument("PlantParams: v, L, dt must be positive");
    }
};

/// Steering angle phi in degrees, |phi| < 90.
struct Control {
    double phi = 0.0;
};

/// Bicycle-model step: p' = p + v dt sin(theta), theta' = theta + (v/L) dt tan(phi).
inline State step(const State& s, const Control& u, const PlantParams& params) {
    params.validate();
    if (!(std::abs(u.phi) < 90.0))
        throw std::invalid_argument("step: |phi| must be < 90 degrees (tan singularity)");
    State next;
    next.p = s.p + params.v * params.dt * std::sin(s.theta * kDegToRad);
    next.theta = s.theta + params.v / params.L * params.dt * std::tan(u.phi * kDegToRad) * kRadToDeg;
    return next;
}

/// phi = -0.74 p_hat - 0.44 theta_hat.
inline Control control_law(double p_hat, double theta_hat) {
    if (!std::isfinite(p_hat) || !std::isfinite(theta_hat))
        throw std::invalid_argument("control_law: non-finite input");
    return {kGainP * p_hat + kGainTheta * theta_hat};
}

/// Interval image of one dynamics step over a (p, theta) box with steering in
/// [phi_min, phi_max]; exact interval arithmetic via monotonicity of sin and
/// tan on (-90, 90) degrees.
inline Box step_overapprox(const Box& cell_box, double phi_min, double phi_max,
                           const PlantParams& params) {
    params.validate();
    cell_box.validate();
    if (cell_box.dim() != 2) throw std::invalid_argument("step_overapprox: box must be (p, theta)");
    if (!(std::abs(cell_box.lo[1]) < 90.0 && std::abs(cell_box.hi[1]) < 90.0))
        throw std::invalid_argument("step_overapprox: theta outside monotone range");
    if (!(phi_min <= phi_max) || !(std::abs(phi_min) < 90.0 && std::abs(phi_max) < 90.0))
        throw std::invalid_argument("step_overapprox: phi bounds outside (-90, 90)");
    const double rate = params.v / params.L * params.dt;
    Box out{Vec(2), Vec(2)};
    out.lo[0] = cell_box.lo[0] + params.v * params.dt * std::sin(cell_box.lo[1] * kDegToRad);
    out.hi[0] = cell_box.hi[0] + params.v * params.dt * std::sin(cell_box.hi[1] * kDegToRad);
    out.lo[1] = cell_box.lo[1] + rate * std::tan(phi_min * kDegToRad) * kRadToDeg;
    out.hi[1] = cell_box.hi[1] + rate * std::tan(phi_max * kDegToRad) * kRadToDeg;
    return out;
}

/// State estimator used in simulation: maps (true state, latent sample) to
/// (p_hat, theta_hat). Image pipelines render or generate the observation
/// internally; the perfect-information estimator just returns the state.
using Estimator = std::function<std::array<double, 2>(const State&, const Vec&)>;

inline Estimator perfect_state_estimator() {
    return [](const State& s, const Vec&) { return std::array<double, 2>{s.p, s.theta}; };
}

/// Per-step latent supply for simulation.
struct LatentSource {
    enum class Mode { Zero, Fixed, RandomInBox };
    Mode mode = Mode::Zero;
    Vec fixed;           // Mode::Fixed
    Box box;             // Mode::RandomInBox
    std::uint64_t seed = 0;
    std::size_t dim = 2;

    static LatentSource zero(std::size_t d = 2) { return {Mode::Zero, {}, {}, 0, d}; }
    static LatentSource fixed_value(Vec z) {
        LatentSource s;
        s.mode = Mode::Fixed;
        s.dim = z.size();
        s.fixed = std::move(z);
        return s;
    }
    static LatentSource random_in(Box b, std::uint64_t seed) {
        LatentSource s;
        s.mode = Mode::RandomInBox;
        s.dim = b.dim();
        s.box = std::move(b);
        s.seed = seed;
        return s;
    }
};

struct TrajectoryPoint {
    double t = 0.0;
    State s;
    double phi = 0.0;    // control applied at this state (0 for the final point)
    double p_hat = 0.0;
    double theta_hat = 0.0;
    bool out_of_domain = false;
};

/// Closed-loop rollout: estimator -> control law -> plant step, for `steps`
/// steps. States leaving `envelope` are flagged, not clamped.
inline std::vector<TrajectoryPoint> simulate(const Estimator& estimator, const State& s0,
                                             std::size_t steps, const PlantParams& params,
                                             const LatentSource& latents, const Box& envelope) {
    params.validate();
    Rng rng(latents.seed);
    std::vector<TrajectoryPoint> traj;
    traj.reserve(steps + 1);
    State s = s0;
    for (std::size_t k = 0; k <= steps; ++k) {
        TrajectoryPoint pt;
        pt.t = static_cast<double>(k) * params.dt;
        pt.s = s;
        pt.out_of_domain = !envelope.contains({s.p, s.theta});
        if (k == steps) {
            traj.push_back(pt);
            break;
        }
        Vec z;
        switch (latents.mode) {
            case LatentSource::Mode::Zero: z.assign(latents.dim, 0.0); break;
            case LatentSource::Mode::Fixed: z = latents.fixed; break;
            case LatentSource::Mode::RandomInBox:
                z.resize(latents.dim);
                for (std::size_t i = 0; i < latents.dim; ++i)
                    z[i] = rng.uniform(latents.box.lo[i], latents.box.hi[i]);
                break;
        }
        const auto est = estimator(s, z);
        pt.p_hat = est[0];
        pt.theta_hat = est[1];
        const Control u = control_law(est[0], est[1]);
        pt.phi = u.phi;
        traj.push_back(pt);
        s = step(s, u, params);
    }
    return traj;
}

}  // namespace taxiverify
