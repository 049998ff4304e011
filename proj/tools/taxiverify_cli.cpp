// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: trains the desk-scale networks, runs the certified
// safety and reachability analyses, and emits figure-ready CSV/PGM artifacts.
// Every subcommand echoes its effective configuration into the output
// directory and is byte-deterministic for a fixed seed and config.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <taxiverify/io.hpp>
#include <taxiverify/network_io.hpp>
#include <taxiverify/train.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace taxiverify;

namespace {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitDiverged = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // Paths.
    std::string generator_path = "generator.json";
    std::string controller_path = "controller.json";
    std::string bounds_path;  // optional action-bounds cache (CSV)
    std::string out_dir = "out";
    // Shared numerics.
    std::uint64_t seed = 1;
    unsigned threads = 1;
    double tol = 1e-4;
    std::uint64_t budget = 200000;
    double latent_lo = -0.8;
    double latent_hi = 0.8;
    Vec grid_lo{-11.0, -30.0};
    Vec grid_hi{11.0, 30.0};
    std::vector<std::size_t> grid_bins{128, 128};
    double dt = 0.1;
    double v = 5.0;
    double wheelbase = 5.0;
    // train
    std::size_t samples = 10000;
    std::vector<std::size_t> generator_hidden{64, 64};
    std::vector<std::size_t> controller_hidden{32, 32};
    std::size_t generator_epochs = 60;
    std::size_t controller_epochs = 60;
    double learning_rate = 0.05;
    double momentum = 0.9;
    std::size_t batch_size = 64;
    bool augment_controller = true;
    // verify-safety
    double p_limit = 10.0;
    double max_uncertified_fraction = 0.0;
    // forward-reach
    Vec init_lo{-10.0, -10.0};
    Vec init_hi{10.0, 10.0};
    std::size_t max_steps = 400;
    std::size_t frame_stride = 1;
    // recall
    std::size_t recall_targets = 200;
    std::size_t histogram_bins = 20;
    // simulate
    Vec sim_starts{-8.0, -6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 8.0};
    double sim_theta0 = 0.0;
    std::size_t sim_steps = 300;
    // eval-preds
    std::size_t eval_samples = 1000;

    void validate() const {
        if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
        if (budget == 0) throw ConfigError("budget must be >= 1");
        if (threads == 0) throw ConfigError("threads must be >= 1");
        if (!(latent_lo <= latent_hi)) throw ConfigError("latent-lo must be <= latent-hi");
        if (grid_lo.size() != 2 || grid_hi.size() != 2 || grid_bins.size() != 2)
            throw ConfigError("grid spec must be 2-d (p, theta)");
        if (!(grid_lo[0] < grid_hi[0] && grid_lo[1] < grid_hi[1]))
            throw ConfigError("grid lo must be < hi");
        if (grid_bins[0] == 0 || grid_bins[1] == 0) throw ConfigError("grid bins must be >= 1");
        if (!(dt > 0.0 && v > 0.0 && wheelbase > 0.0))
            throw ConfigError("dt, v, wheelbase must be > 0");
        if (init_lo.size() != 2 || init_hi.size() != 2)
            throw ConfigError("initial region must be 2-d (p, theta)");
        if (!(init_lo[0] <= init_hi[0] && init_lo[1] <= init_hi[1]))
            throw ConfigError("initial region lo must be <= hi");
        if (!(max_uncertified_fraction >= 0.0 && max_uncertified_fraction <= 1.0))
            throw ConfigError("max-uncertified-fraction must be in [0, 1]");
        if (samples == 0) throw ConfigError("samples must be >= 1");
        if (recall_targets == 0) throw ConfigError("recall-targets must be >= 1");
        if (eval_samples == 0) throw ConfigError("eval-samples must be >= 1");
        if (histogram_bins == 0) throw ConfigError("histogram-bins must be >= 1");
        if (sim_starts.empty()) throw ConfigError("sim-starts must not be empty");
    }

    Box latent_box() const { return Box{{latent_lo, latent_lo}, {latent_hi, latent_hi}}; }
    Grid grid() const { return Grid(Box{grid_lo, grid_hi}, grid_bins[0], grid_bins[1]); }
    PlantParams plant() const { return PlantParams{v, wheelbase, dt}; }
};

json to_json(const RunConfig& c) {
    json j;
    j["generator"] = c.generator_path;
    j["controller"] = c.controller_path;
    j["bounds"] = c.bounds_path;
    j["out"] = c.out_dir;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["tol"] = c.tol;
    j["budget"] = c.budget;
    j["latent_lo"] = c.latent_lo;
    j["latent_hi"] = c.latent_hi;
    j["grid_lo"] = c.grid_lo;
    j["grid_hi"] = c.grid_hi;
    j["grid_bins"] = c.grid_bins;
    j["dt"] = c.dt;
    j["v"] = c.v;
    j["wheelbase"] = c.wheelbase;
    j["samples"] = c.samples;
    j["generator_hidden"] = c.generator_hidden;
    j["controller_hidden"] = c.controller_hidden;
    j["generator_epochs"] = c.generator_epochs;
    j["controller_epochs"] = c.controller_epochs;
    j["learning_rate"] = c.learning_rate;
    j["momentum"] = c.momentum;
    j["batch_size"] = c.batch_size;
    j["augment_controller"] = c.augment_controller;
    j["p_limit"] = c.p_limit;
    j["max_uncertified_fraction"] = c.max_uncertified_fraction;
    j["init_lo"] = c.init_lo;
    j["init_hi"] = c.init_hi;
    j["max_steps"] = c.max_steps;
    j["frame_stride"] = c.frame_stride;
    j["recall_targets"] = c.recall_targets;
    j["histogram_bins"] = c.histogram_bins;
    j["sim_starts"] = c.sim_starts;
    j["sim_theta0"] = c.sim_theta0;
    j["sim_steps"] = c.sim_steps;
    j["eval_samples"] = c.eval_samples;
    return j;
}

void overlay_json(RunConfig& c, const json& j) {
    c.generator_path = j.value("generator", c.generator_path);
    c.controller_path = j.value("controller", c.controller_path);
    c.bounds_path = j.value("bounds", c.bounds_path);
    c.out_dir = j.value("out", c.out_dir);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.tol = j.value("tol", c.tol);
    c.budget = j.value("budget", c.budget);
    c.latent_lo = j.value("latent_lo", c.latent_lo);
    c.latent_hi = j.value("latent_hi", c.latent_hi);
    c.grid_lo = j.value("grid_lo", c.grid_lo);
    c.grid_hi = j.value("grid_hi", c.grid_hi);
    c.grid_bins = j.value("grid_bins", c.grid_bins);
    c.dt = j.value("dt", c.dt);
    c.v = j.value("v", c.v);
    c.wheelbase = j.value("wheelbase", c.wheelbase);
    c.samples = j.value("samples", c.samples);
    c.generator_hidden = j.value("generator_hidden", c.generator_hidden);
    c.controller_hidden = j.value("controller_hidden", c.controller_hidden);
    c.generator_epochs = j.value("generator_epochs", c.generator_epochs);
    c.controller_epochs = j.value("controller_epochs", c.controller_epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.momentum = j.value("momentum", c.momentum);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.augment_controller = j.value("augment_controller", c.augment_controller);
    c.p_limit = j.value("p_limit", c.p_limit);
    c.max_uncertified_fraction = j.value("max_uncertified_fraction", c.max_uncertified_fraction);
    c.init_lo = j.value("init_lo", c.init_lo);
    c.init_hi = j.value("init_hi", c.init_hi);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.frame_stride = j.value("frame_stride", c.frame_stride);
    c.recall_targets = j.value("recall_targets", c.recall_targets);
    c.histogram_bins = j.value("histogram_bins", c.histogram_bins);
    c.sim_starts = j.value("sim_starts", c.sim_starts);
    c.sim_theta0 = j.value("sim_theta0", c.sim_theta0);
    c.sim_steps = j.value("sim_steps", c.sim_steps);
    c.eval_samples = j.value("eval_samples", c.eval_samples);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

/// Echoes the effective configuration and toolkit version into the output dir.
void write_effective_config(const RunConfig& cfg, const std::string& subcommand) {
    fs::create_directories(cfg.out_dir);
    json j = to_json(cfg);
    j["version"] = TAXIVERIFY_VERSION;
    j["subcommand"] = subcommand;
    auto os = open_out(out_path(cfg, "config.json"));
    os << j.dump(1) << "\n";
}

Network load_network_or_config_error(const std::string& path, const std::string& role) {
    if (!fs::exists(path)) throw ConfigError(role + " network file not found: " + path);
    try {
        return load_network(path);
    } catch (const std::exception& e) {
        throw ConfigError(role + " network file " + path + ": " + e.what());
    }
}

/// Per-cell certified steering bounds, reused from a cache when one exists.
/// Lookup order: explicit --bounds path, then <out>/action_bounds.csv from a
/// previous run, else a fresh computation. The cache is always (re)written so
/// the output directory is self-contained.
std::vector<ActionBounds> get_action_bounds(const RunConfig& cfg, const Network& composite,
                                            const Grid& grid) {
    std::vector<ActionBounds> bounds;
    const std::string cache = out_path(cfg, "action_bounds.csv");
    std::string source;
    if (!cfg.bounds_path.empty()) {
        if (!fs::exists(cfg.bounds_path))
            throw ConfigError("action bounds file not found: " + cfg.bounds_path);
        auto is = open_in(cfg.bounds_path);
        bounds = read_action_bounds_csv(is);
        source = cfg.bounds_path;
    } else if (fs::exists(cache)) {
        auto is = open_in(cache);
        bounds = read_action_bounds_csv(is);
        source = cache;
    } else {
        bounds = all_action_bounds(composite, grid, cfg.latent_box(), cfg.tol, cfg.budget,
                                   cfg.threads);
    }
    if (!source.empty()) {
        if (bounds.size() != grid.n_cells())
            throw ConfigError("action bounds in " + source + " cover " +
                              std::to_string(bounds.size()) + " cells, grid has " +
                              std::to_string(grid.n_cells()));
        for (std::size_t i = 0; i < bounds.size(); ++i)
            if (bounds[i].cell != static_cast<CellId>(i))
                throw ConfigError("action bounds in " + source + " are not indexed by cell");
        std::cout << "action bounds: reusing " << source << "\n";
    }
    auto os = open_out(cache);
    write_action_bounds_csv(bounds, os);
    return bounds;
}

void require_uncertified_within_budget(const RunConfig& cfg, const std::vector<ActionBounds>& bounds) {
    std::size_t uncertified = 0;
    for (const auto& ab : bounds) uncertified += ab.certified ? 0 : 1;
    const double frac = static_cast<double>(uncertified) / static_cast<double>(bounds.size());
    std::cout << "uncertified cells: " << uncertified << " / " << bounds.size() << "\n";
    if (frac > cfg.max_uncertified_fraction)
        throw BudgetExhausted("budget exhausted on " + std::to_string(uncertified) + " of " +
                              std::to_string(bounds.size()) + " cells (fraction " +
                              fmt_double(frac) + " > allowed " +
                              fmt_double(cfg.max_uncertified_fraction) + ")");
}

Network load_composite(const RunConfig& cfg) {
    const Network gen = load_network_or_config_error(cfg.generator_path, "generator");
    const Network ctrl = load_network_or_config_error(cfg.controller_path, "controller");
    try {
        return concatenate(gen, ctrl);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("generator and controller do not compose: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_train(const RunConfig& cfg) {
    write_effective_config(cfg, "train");
    const Dataset ds = make_dataset(cfg.samples, cfg.seed);

    TrainConfig gcfg;
    gcfg.hidden = cfg.generator_hidden;
    gcfg.learning_rate = cfg.learning_rate;
    gcfg.momentum = cfg.momentum;
    gcfg.batch_size = cfg.batch_size;
    gcfg.epochs = cfg.generator_epochs;
    gcfg.seed = cfg.seed + 10;
    const TrainResult gen = train_generator(ds, gcfg);
    std::cout << "generator: loss " << fmt_double(gen.loss_trace.front()) << " -> "
              << fmt_double(gen.loss_trace.back()) << "\n";

    TrainConfig ccfg = gcfg;
    ccfg.hidden = cfg.controller_hidden;
    ccfg.epochs = cfg.controller_epochs;
    ccfg.seed = cfg.seed + 11;
    const TrainResult ctrl =
        train_controller(ds, ccfg, cfg.augment_controller ? &gen.net : nullptr);
    std::cout << "controller: loss " << fmt_double(ctrl.loss_trace.front()) << " -> "
              << fmt_double(ctrl.loss_trace.back()) << "\n";

    save_network(gen.net, out_path(cfg, "generator.json"));
    save_network(ctrl.net, out_path(cfg, "controller.json"));
    auto os = open_out(out_path(cfg, "losses.csv"));
    write_loss_csv(gen.loss_trace, ctrl.loss_trace, os);
    return kExitOk;
}

int cmd_verify_safety(const RunConfig& cfg) {
    write_effective_config(cfg, "verify-safety");
    const Network composite = load_composite(cfg);
    const Grid grid = cfg.grid();
    const auto bounds = get_action_bounds(cfg, composite, grid);

    const TransitionMap tm = build_transitions(grid, bounds, cfg.plant(), cfg.threads);
    const UnsafeSet unsafe = runway_unsafe_set(grid, cfg.p_limit);
    const auto labels = backward_safety(tm, unsafe);

    std::size_t n_safe = 0;
    for (const auto l : labels) n_safe += l == CellLabel::Safe ? 1 : 0;
    std::cout << "SAFE cells: " << n_safe << " / " << labels.size() << "\n";

    {
        auto os = open_out(out_path(cfg, "safe_cells.csv"));
        write_cell_labels_csv(grid, labels, os);
    }
    {
        auto os = open_out(out_path(cfg, "safety.pgm"));
        write_labels_pgm(grid, labels, os);
    }
    require_uncertified_within_budget(cfg, bounds);
    return kExitOk;
}

int cmd_forward_reach(const RunConfig& cfg) {
    write_effective_config(cfg, "forward-reach");
    const Network composite = load_composite(cfg);
    const Grid grid = cfg.grid();
    const auto bounds = get_action_bounds(cfg, composite, grid);

    const TransitionMap tm = build_transitions(grid, bounds, cfg.plant(), cfg.threads);
    const ReachSet rs = forward_reach(tm, grid, Box{cfg.init_lo, cfg.init_hi}, cfg.max_steps);

    char name[64];
    for (std::size_t t = 0; t < rs.steps.size(); ++t) {
        if (t % cfg.frame_stride != 0 && t + 1 != rs.steps.size()) continue;
        std::snprintf(name, sizeof(name), "reach_%04zu.csv", t);
        auto os = open_out(out_path(cfg, name));
        os << "cell_index\n";
        for (std::size_t c = 0; c < rs.steps[t].n; ++c)
            if (rs.steps[t].get(c)) os << c << '\n';
        std::snprintf(name, sizeof(name), "reach_%04zu.pgm", t);
        auto osp = open_out(out_path(cfg, name));
        write_cellset_pgm(grid, rs.steps[t], osp);
    }
    {
        auto os = open_out(out_path(cfg, "converged.csv"));
        os << "steps,converged_at,sink\n";
        os << rs.steps.size() - 1 << ',';
        if (rs.converged_at) os << *rs.converged_at;
        os << ',' << int(rs.sink.back() != 0) << '\n';
    }
    std::cout << "reach: " << rs.steps.size() - 1 << " transitions, "
              << (rs.converged_at ? "converged at step " + std::to_string(*rs.converged_at)
                                  : std::string("not converged"))
              << ", sink " << int(rs.sink.back() != 0) << "\n";
    require_uncertified_within_budget(cfg, bounds);
    return kExitOk;
}

int cmd_recall(const RunConfig& cfg) {
    write_effective_config(cfg, "recall");
    const Network gen = load_network_or_config_error(cfg.generator_path, "generator");
    if (gen.output_dim() != kImagePixels)
        throw ConfigError("generator does not produce observations (output dim " +
                          std::to_string(gen.output_dim()) + ")");

    const Dataset targets = make_dataset(cfg.recall_targets, cfg.seed);
    std::vector<State> states;
    std::vector<Vec> images;
    states.reserve(targets.size());
    images.reserve(targets.size());
    for (const auto& rec : targets.records) {
        states.push_back({rec.p, rec.theta});
        images.push_back(rec.image);
    }
    const auto records = all_nearest_distances(gen, states, images, cfg.latent_box(), cfg.tol,
                                               cfg.budget, cfg.threads);
    {
        auto os = open_out(out_path(cfg, "distances.csv"));
        write_distances_csv(records, os);
    }
    const RecallCurve curve = recall_curve(records, default_threshold_grid(records));
    {
        auto os = open_out(out_path(cfg, "recall.csv"));
        write_recall_csv(curve, os);
    }
    double dmax = 0.0;
    std::size_t uncertified = 0;
    for (const auto& rec : records) {
        dmax = std::max(dmax, rec.distance);
        uncertified += rec.certified ? 0 : 1;
    }
    {
        auto os = open_out(out_path(cfg, "histogram.csv"));
        write_histogram_csv(distance_histogram(records, cfg.histogram_bins,
                                               dmax > 0.0 ? dmax : 1.0),
                            os);
    }
    std::cout << "distances: max " << fmt_double(dmax) << ", uncertified " << uncertified << " / "
              << records.size() << "\n";
    if (uncertified > 0 && cfg.max_uncertified_fraction <
                               static_cast<double>(uncertified) / static_cast<double>(records.size()))
        throw BudgetExhausted("budget exhausted on " + std::to_string(uncertified) + " of " +
                              std::to_string(records.size()) + " distance queries");
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
    write_effective_config(cfg, "simulate");
    const Network composite = load_composite(cfg);
    const Box envelope{cfg.grid_lo, cfg.grid_hi};
    const Box latent = cfg.latent_box();

    std::vector<std::vector<TrajectoryPoint>> trajs;
    trajs.reserve(cfg.sim_starts.size());
    for (std::size_t run = 0; run < cfg.sim_starts.size(); ++run) {
        const Estimator est = [&](const State& s, const Vec& z) {
            Vec in{s.p, s.theta};
            in.insert(in.end(), z.begin(), z.end());
            const Vec y = evaluate(composite, in);
            return std::array<double, 2>{y[0], y[1]};
        };
        trajs.push_back(simulate(est, {cfg.sim_starts[run], cfg.sim_theta0}, cfg.sim_steps,
                                 cfg.plant(), LatentSource::random_in(latent, cfg.seed + run),
                                 envelope));
    }
    auto os = open_out(out_path(cfg, "trajectories.csv"));
    write_trajectories_csv(trajs, os);
    for (std::size_t run = 0; run < trajs.size(); ++run) {
        bool ood = false;
        for (const auto& pt : trajs[run]) ood = ood || pt.out_of_domain;
        std::cout << "run " << run << ": p0 " << fmt_double(cfg.sim_starts[run]) << ", final p "
                  << fmt_double(trajs[run].back().s.p) << (ood ? " (left the domain)" : "") << "\n";
    }
    return kExitOk;
}

/// Scatter data comparing controller predictions on rendered observations and
/// on the generator's reconstructions of the same records.
int cmd_eval_preds(const RunConfig& cfg) {
    write_effective_config(cfg, "eval-preds");
    const Network gen = load_network_or_config_error(cfg.generator_path, "generator");
    const Network ctrl = load_network_or_config_error(cfg.controller_path, "controller");
    const Dataset ds = make_dataset(cfg.eval_samples, cfg.seed);

    auto os = open_out(out_path(cfg, "preds.csv"));
    os << "index,p,theta,z1,z2,p_hat_rendered,theta_hat_rendered,p_hat_generated,"
          "theta_hat_generated\n";
    double se_r[2] = {0.0, 0.0}, se_g[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& rec = ds.records[i];
        const Vec pred_r = evaluate(ctrl, rec.image);
        const Vec pred_g = evaluate(ctrl, evaluate(gen, {rec.p, rec.theta, rec.z1, rec.z2}));
        os << i << ',' << fmt_double(rec.p) << ',' << fmt_double(rec.theta) << ','
           << fmt_double(rec.z1) << ',' << fmt_double(rec.z2) << ',' << fmt_double(pred_r[0])
           << ',' << fmt_double(pred_r[1]) << ',' << fmt_double(pred_g[0]) << ','
           << fmt_double(pred_g[1]) << '\n';
        const double truth[2] = {rec.p, rec.theta};
        for (int d = 0; d < 2; ++d) {
            se_r[d] += (pred_r[d] - truth[d]) * (pred_r[d] - truth[d]);
            se_g[d] += (pred_g[d] - truth[d]) * (pred_g[d] - truth[d]);
        }
    }
    const double n = static_cast<double>(ds.size());
    std::cout << "rendered RMSE: p " << fmt_double(std::sqrt(se_r[0] / n)) << ", theta "
              << fmt_double(std::sqrt(se_r[1] / n)) << "\n";
    std::cout << "generated RMSE: p " << fmt_double(std::sqrt(se_g[0] / n)) << ", theta "
              << fmt_double(std::sqrt(se_g[1] / n)) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified closed-loop verification of a vision-based taxi controller"};
    app.set_version_flag("--version", TAXIVERIFY_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig flags;  // values captured from the command line
    std::string config_path;

    // Options named here may also be set by the JSON config file; command-line
    // values win. The pair list remembers which flags were actually given.
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;
    const auto opt = [&](CLI::Option* o, std::function<void(RunConfig&)> apply) {
        overrides.emplace_back(o, std::move(apply));
    };

    app.add_option("--config", config_path, "JSON config file; flags override its values");
    opt(app.add_option("--out", flags.out_dir, "output directory (default: out)"),
        [&](RunConfig& c) { c.out_dir = flags.out_dir; });
    opt(app.add_option("--generator", flags.generator_path, "generator network JSON"),
        [&](RunConfig& c) { c.generator_path = flags.generator_path; });
    opt(app.add_option("--controller", flags.controller_path, "controller network JSON"),
        [&](RunConfig& c) { c.controller_path = flags.controller_path; });
    opt(app.add_option("--bounds", flags.bounds_path, "cached action-bounds CSV to reuse"),
        [&](RunConfig& c) { c.bounds_path = flags.bounds_path; });
    opt(app.add_option("--seed", flags.seed, "master random seed"),
        [&](RunConfig& c) { c.seed = flags.seed; });
    opt(app.add_option("--threads", flags.threads, "worker thread cap"),
        [&](RunConfig& c) { c.threads = flags.threads; });
    opt(app.add_option("--tol", flags.tol, "branch-and-bound tolerance"),
        [&](RunConfig& c) { c.tol = flags.tol; });
    opt(app.add_option("--budget", flags.budget, "branch-and-bound node budget"),
        [&](RunConfig& c) { c.budget = flags.budget; });
    opt(app.add_option("--latent-lo", flags.latent_lo, "latent box lower bound (both dims)"),
        [&](RunConfig& c) { c.latent_lo = flags.latent_lo; });
    opt(app.add_option("--latent-hi", flags.latent_hi, "latent box upper bound (both dims)"),
        [&](RunConfig& c) { c.latent_hi = flags.latent_hi; });
    std::size_t bins = 0;
    opt(app.add_option("--grid-bins", bins, "cells per dimension (square grid)"),
        [&](RunConfig& c) { c.grid_bins = {bins, bins}; });
    opt(app.add_option("--dt", flags.dt, "plant timestep, s"),
        [&](RunConfig& c) { c.dt = flags.dt; });
    opt(app.add_option("--samples", flags.samples, "training dataset size"),
        [&](RunConfig& c) { c.samples = flags.samples; });
    std::size_t epochs = 0;
    opt(app.add_option("--epochs", epochs, "epochs for both networks"),
        [&](RunConfig& c) { c.generator_epochs = c.controller_epochs = epochs; });
    opt(app.add_option("--max-uncertified-fraction", flags.max_uncertified_fraction,
                       "allowed fraction of budget-exhausted queries"),
        [&](RunConfig& c) { c.max_uncertified_fraction = flags.max_uncertified_fraction; });
    opt(app.add_option("--max-steps", flags.max_steps, "forward-reach step cap"),
        [&](RunConfig& c) { c.max_steps = flags.max_steps; });
    opt(app.add_option("--recall-targets", flags.recall_targets, "number of reference images"),
        [&](RunConfig& c) { c.recall_targets = flags.recall_targets; });
    opt(app.add_option("--eval-samples", flags.eval_samples, "eval-preds sample count"),
        [&](RunConfig& c) { c.eval_samples = flags.eval_samples; });

    CLI::App* sub_train = app.add_subcommand("train", "train generator and controller");
    CLI::App* sub_safety = app.add_subcommand("verify-safety", "certified backward safety labels");
    CLI::App* sub_reach = app.add_subcommand("forward-reach", "overapproximated reachable sets");
    CLI::App* sub_recall = app.add_subcommand("recall", "certified nearest-image recall metric");
    CLI::App* sub_sim = app.add_subcommand("simulate", "closed-loop trajectory rollouts");
    CLI::App* sub_eval = app.add_subcommand("eval-preds", "prediction scatter data");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            if (!fs::exists(config_path)) throw ConfigError("config file not found: " + config_path);
            json j;
            try {
                auto is = open_in(config_path);
                is >> j;
            } catch (const json::exception& e) {
                throw ConfigError("config file " + config_path + ": " + e.what());
            }
            overlay_json(cfg, j);
        }
        for (const auto& [option, apply] : overrides)
            if (option->count() > 0) apply(cfg);
        cfg.validate();

        if (sub_train->parsed()) return cmd_train(cfg);
        if (sub_safety->parsed()) return cmd_verify_safety(cfg);
        if (sub_reach->parsed()) return cmd_forward_reach(cfg);
        if (sub_recall->parsed()) return cmd_recall(cfg);
        if (sub_sim->parsed()) return cmd_simulate(cfg);
        if (sub_eval->parsed()) return cmd_eval_preds(cfg);
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BudgetExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const TrainingDiverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
